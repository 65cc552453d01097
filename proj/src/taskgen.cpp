#include "litrev/taskgen.hpp"

#include <fstream>
#include <sstream>

#include "litrev/errors.hpp"
#include "litrev/text.hpp"

namespace litrev::taskgen {

const char* task_name(TaskKind t) {
  switch (t) {
    case TaskKind::Task1_References: return "task1";
    case TaskKind::Task2_Abstract: return "task2";
    case TaskKind::Task3_Review: return "task3";
  }
  return "task?";
}

int task_number(TaskKind t) {
  switch (t) {
    case TaskKind::Task1_References: return 1;
    case TaskKind::Task2_Abstract: return 2;
    case TaskKind::Task3_Review: return 3;
  }
  return 0;
}

TaskKind task_from_number(int n) {
  switch (n) {
    case 1: return TaskKind::Task1_References;
    case 2: return TaskKind::Task2_Abstract;
    case 3: return TaskKind::Task3_Review;
    default: throw Error(Errc::InvalidArgument, "task number must be 1, 2, or 3");
  }
}

namespace {

constexpr const char* kTask1Template =
    R"(Imagine you are an experienced academic researcher with access to a vast library of scientific literature. I would like you to find the 10 studies that are most relevant to the research topic provided in the "Title" and the "Keywords" below.
Please cite the studies according to the following JSON format. There is no need to provide any explanation before or after the JSON output. Ensure that the "authors" field lists the names of all authors and not exceeding 10 authors, and that there are no duplicate author names nor abbreviations such as "et al.".
{
  "References": [
    {
      "title": "",
      "authors": "",
      "journal": "",
      "year": "",
      "volumes": "",
      "first page": "",
      "last page": "",
    }
  ]
}
Title: {title}
Keywords: {keywords})";

constexpr const char* kTask2Template =
    R"(Imagine you are an experienced academic researcher with access to a vast library of scientific literature. I would like you to write an abstract according to the research topic provided in the "Title" and the "Keywords" below. Please write the abstract for about {word_count} words, according to the JSON format as follows. There is no need to provide any explanation before or after the JSON output.
{"Abstract": ""}
Title: {title}
Keywords: {keywords})";

constexpr const char* kTask3Template =
    R"(Imagine you are an experienced academic researcher with access to a vast library of scientific literature. I would like you to write a literature review according to the research topic provided in the "Title", "Abstract" and "Keywords" below.
The literature review should be about 1000 words long. I would like you to back up claims by citing previous studies (with a total of 10 citations in the literature review). The output should be in JSON format as follows:
{
  "Literature Review": "xxx",
  "References": [
    {
      "title": "",
      "authors": "",
      "journal": "",
      "year": "",
      "volumes": "",
      "first page": "",
      "last page": "",
    }
  ]
}
The "Literature Review" field should be about 1000 words. The "References" field is a list of 10 references, and ensures that the "authors" field lists the names of all authors and not exceeding 10 authors, and that there are no duplicate author names nor abbreviations such as "et al.".
Title: {title}
Keywords: {keywords}
Abstract: {abstract})";

// Single pass: substituted values are never rescanned for placeholders.
std::string substitute(const std::string& tmpl,
                       const std::vector<std::pair<std::string, std::string>>& subs) {
  std::string out;
  out.reserve(tmpl.size());
  size_t pos = 0;
  while (pos < tmpl.size()) {
    size_t best = std::string::npos;
    const std::pair<std::string, std::string>* hit = nullptr;
    for (const auto& s : subs) {
      const size_t at = tmpl.find(s.first, pos);
      if (at < best) {
        best = at;
        hit = &s;
      }
    }
    if (!hit) {
      out.append(tmpl, pos, std::string::npos);
      break;
    }
    out.append(tmpl, pos, best - pos);
    out += hit->second;
    pos = best + hit->first.size();
  }
  return out;
}

std::string join_keywords(const std::vector<std::string>& keywords) {
  std::string out;
  for (const auto& k : keywords) {
    if (!out.empty()) out += ", ";
    out += k;
  }
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::ConfigError, "cannot open template file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

const TemplateSet& default_templates() {
  static const TemplateSet set{kTask1Template, kTask2Template, kTask3Template};
  return set;
}

TemplateSet load_templates_dir(const std::string& dir) {
  TemplateSet set;
  set.task1 = read_file(dir + "/task1.txt");
  set.task2 = read_file(dir + "/task2.txt");
  set.task3 = read_file(dir + "/task3.txt");
  return set;
}

int count_words(const std::string& s) { return text::count_words(s); }

PromptInstance build_prompt(const corpus::ArticleRecord& article, TaskKind task,
                            const TemplateSet& templates) {
  PromptInstance p;
  p.task = task;
  p.article_id = article.id;
  std::vector<std::pair<std::string, std::string>> subs = {
      {"{title}", article.title},
      {"{keywords}", join_keywords(article.keywords)},
  };
  const std::string* tmpl = nullptr;
  switch (task) {
    case TaskKind::Task1_References:
      tmpl = &templates.task1;
      break;
    case TaskKind::Task2_Abstract:
      tmpl = &templates.task2;
      p.target_word_count = count_words(article.abstract);
      subs.emplace_back("{word_count}", std::to_string(p.target_word_count));
      break;
    case TaskKind::Task3_Review:
      tmpl = &templates.task3;
      p.required_citations = kRequestedReferences;
      subs.emplace_back("{abstract}", article.abstract);
      break;
  }
  p.prompt_text = substitute(*tmpl, subs);
  return p;
}

}  // namespace litrev::taskgen
