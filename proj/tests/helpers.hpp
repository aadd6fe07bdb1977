#ifndef TEST_HELPERS_HPP
#define TEST_HELPERS_HPP

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "af2/workspace.hpp"

inline std::string slurp_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

inline af2::Workspace load_corpus_file(const std::string& name) {
    return af2::parse_workspace(slurp_file(std::string(CORPUS_DIR) + "/" + name));
}

inline std::vector<std::string> corpus_files() {
    return {"church.af2", "eqrules.af2", "paradigm.af2", "subproofs.af2"};
}

#endif
