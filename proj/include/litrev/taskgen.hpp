#pragma once

#include <string>

#include "litrev/corpus.hpp"

namespace litrev::taskgen {

enum class TaskKind { Task1_References, Task2_Abstract, Task3_Review };

const char* task_name(TaskKind t);
int task_number(TaskKind t);
TaskKind task_from_number(int n);

inline constexpr int kRequestedReferences = 10;

struct PromptInstance {
  TaskKind task;
  std::string article_id;
  std::string prompt_text;
  int target_word_count = 0;   // Task 2 only
  int required_citations = 0;  // Task 3 only, fixed 10
};

// Versioned prompt wording; defaults are compiled in, a directory with
// task1.txt/task2.txt/task3.txt overrides them. Placeholders: {title},
// {keywords}, {abstract}, {word_count}.
struct TemplateSet {
  std::string task1;
  std::string task2;
  std::string task3;
};

const TemplateSet& default_templates();
TemplateSet load_templates_dir(const std::string& dir);

int count_words(const std::string& s);

PromptInstance build_prompt(const corpus::ArticleRecord& article, TaskKind task,
                            const TemplateSet& templates = default_templates());

}  // namespace litrev::taskgen
