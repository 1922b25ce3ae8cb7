#pragma once

#include <string>

#include "erasure/corpus.hpp"
#include "erasure/spec_format.hpp"

namespace erasure::testing {

inline std::string corpus_file(const std::string& name) { return corpus_dir() + "/" + name; }

template <class T>
T load_text(const std::string& text) {
  return std::get<T>(load_model(text));
}

template <class T>
T load_corpus(const std::string& name) {
  return std::get<T>(load_model_file(corpus_file(name)));
}

inline SystemSpec system_text(const std::string& text) { return load_text<SystemSpec>(text); }
inline UserSpec user_text(const std::string& text) { return load_text<UserSpec>(text); }

inline const ValueDomain& bits() {
  static const ValueDomain d({"0", "1"});
  return d;
}

}  // namespace erasure::testing
