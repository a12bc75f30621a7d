#pragma once

#include <string>
#include <vector>

#include "deplabel/conllu.hpp"
#include "deplabel/tree.hpp"

namespace deplabel::testing {

inline std::string data_path(const std::string& name) {
  return std::string(DEPLABEL_TEST_DATA) + "/" + name;
}

// "Alice ate an apple", the running example: heads 2,0,4,2.
inline DepTree figure1_tree() {
  return {{2, 0, 4, 2}, {"nsubj", "root", "det", "dobj"}};
}

inline std::vector<std::string> figure1_pos() { return {"N", "V", "D", "N"}; }

inline Sentence figure1_sentence() {
  return read_conllu_file(data_path("figure1.conllu")).at(0);
}

}  // namespace deplabel::testing
