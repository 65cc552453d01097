#include <map>
#include <sstream>
#include <string>

#include "litrev/outparse.hpp"
#include "litrev/text.hpp"

namespace litrev::outparse {

namespace {

// Keys and values are both in normalized form (lowercase, punctuation
// stripped) and values are fixed points of normalize_venue.
const std::map<std::string, std::string>& full_venue_table() {
  static const std::map<std::string, std::string> table = {
      {"annu rev anal chem", "annual review of analytical chemistry"},
      {"annu rev anim biosci", "annual review of animal biosciences"},
      {"annu rev astron astrophys", "annual review of astronomy and astrophysics"},
      {"annu rev biochem", "annual review of biochemistry"},
      {"annu rev biomed data sci", "annual review of biomedical data science"},
      {"annu rev biomed eng", "annual review of biomedical engineering"},
      {"annu rev biophys", "annual review of biophysics"},
      {"annu rev cancer biol", "annual review of cancer biology"},
      {"annu rev cell dev biol", "annual review of cell and developmental biology"},
      {"annu rev chem biomol eng", "annual review of chemical and biomolecular engineering"},
      {"annu rev clin psychol", "annual review of clinical psychology"},
      {"annu rev condens matter phys", "annual review of condensed matter physics"},
      {"annu rev control robot auton syst",
       "annual review of control robotics and autonomous systems"},
      {"annu rev criminol", "annual review of criminology"},
      {"annu rev dev psychol", "annual review of developmental psychology"},
      {"annu rev earth planet sci", "annual review of earth and planetary sciences"},
      {"annu rev ecol evol syst", "annual review of ecology evolution and systematics"},
      {"annu rev econom", "annual review of economics"},
      {"annu rev econ", "annual review of economics"},
      {"annu rev entomol", "annual review of entomology"},
      {"annu rev environ resour", "annual review of environment and resources"},
      {"annu rev financ econ", "annual review of financial economics"},
      {"annu rev fluid mech", "annual review of fluid mechanics"},
      {"annu rev food sci technol", "annual review of food science and technology"},
      {"annu rev genet", "annual review of genetics"},
      {"annu rev genom hum genet", "annual review of genomics and human genetics"},
      {"annu rev genomics hum genet", "annual review of genomics and human genetics"},
      {"annu rev immunol", "annual review of immunology"},
      {"annu rev law soc sci", "annual review of law and social science"},
      {"annu rev linguist", "annual review of linguistics"},
      {"annu rev mar sci", "annual review of marine science"},
      {"annu rev mater res", "annual review of materials research"},
      {"annu rev med", "annual review of medicine"},
      {"annu rev microbiol", "annual review of microbiology"},
      {"annu rev neurosci", "annual review of neuroscience"},
      {"annu rev nucl part sci", "annual review of nuclear and particle science"},
      {"annu rev nutr", "annual review of nutrition"},
      {"annu rev organ psychol organ behav",
       "annual review of organizational psychology and organizational behavior"},
      {"annu rev pathol", "annual review of pathology mechanisms of disease"},
      {"annu rev pathol mech dis", "annual review of pathology mechanisms of disease"},
      {"annu rev pharmacol toxicol", "annual review of pharmacology and toxicology"},
      {"annu rev phys chem", "annual review of physical chemistry"},
      {"annu rev physiol", "annual review of physiology"},
      {"annu rev phytopathol", "annual review of phytopathology"},
      {"annu rev plant biol", "annual review of plant biology"},
      {"annu rev polit sci", "annual review of political science"},
      {"annu rev psychol", "annual review of psychology"},
      {"annu rev public health", "annual review of public health"},
      {"annu rev resour econ", "annual review of resource economics"},
      {"annu rev sociol", "annual review of sociology"},
      {"annu rev stat appl", "annual review of statistics and its application"},
      {"annu rev virol", "annual review of virology"},
      {"annu rev vis sci", "annual review of vision science"},
      {"proc natl acad sci", "proceedings of the national academy of sciences"},
      {"proc natl acad sci u s a", "proceedings of the national academy of sciences"},
      {"j am chem soc", "journal of the american chemical society"},
      {"phys rev lett", "physical review letters"},
      {"j mach learn res", "journal of machine learning research"},
      {"n engl j med", "new england journal of medicine"},
      {"nat commun", "nature communications"},
      {"j biol chem", "journal of biological chemistry"},
  };
  return table;
}

const std::map<std::string, std::string>& token_expansions() {
  static const std::map<std::string, std::string> table = {
      {"annu", "annual"},       {"rev", "review"},         {"j", "journal"},
      {"jour", "journal"},      {"int", "international"},  {"intl", "international"},
      {"proc", "proceedings"},  {"trans", "transactions"}, {"assoc", "association"},
      {"soc", "society"},       {"natl", "national"},      {"acad", "academy"},
      {"am", "american"},       {"eng", "engineering"},    {"med", "medicine"},
      {"biol", "biology"},      {"chem", "chemistry"},     {"phys", "physics"},
      {"sci", "science"},       {"stat", "statistics"},    {"appl", "applied"},
      {"environ", "environmental"}, {"psychol", "psychology"}, {"sociol", "sociology"},
      {"econ", "economics"},    {"mech", "mechanics"},     {"mater", "materials"},
      {"res", "research"},      {"lett", "letters"},       {"technol", "technology"},
      {"microbiol", "microbiology"}, {"neurosci", "neuroscience"}, {"immunol", "immunology"},
      {"genet", "genetics"},    {"virol", "virology"},     {"entomol", "entomology"},
      {"physiol", "physiology"}, {"pathol", "pathology"},  {"pharmacol", "pharmacology"},
      {"toxicol", "toxicology"}, {"nutr", "nutrition"},    {"linguist", "linguistics"},
      {"criminol", "criminology"}, {"anal", "analytical"}, {"astron", "astronomy"},
      {"astrophys", "astrophysics"}, {"biochem", "biochemistry"}, {"biophys", "biophysics"},
      {"geophys", "geophysics"},
  };
  return table;
}

}  // namespace

std::string normalize_venue(const std::string& venue) {
  const std::string norm = text::normalize_text(venue);
  const auto& full = full_venue_table();
  if (auto it = full.find(norm); it != full.end()) return it->second;

  const auto& tokens_map = token_expansions();
  std::istringstream in(norm);
  std::string tok;
  std::string out;
  while (in >> tok) {
    auto it = tokens_map.find(tok);
    if (!out.empty()) out += ' ';
    out += (it != tokens_map.end()) ? it->second : tok;
  }
  return out;
}

}  // namespace litrev::outparse
