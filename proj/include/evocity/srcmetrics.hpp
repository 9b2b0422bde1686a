#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace evocity::srcmetrics {

struct ClassMetrics {
  std::size_t num_instance_variables = 0;
  std::size_t num_for_loops = 0;
  std::size_t num_methods = 0;
  std::size_t lines_of_code = 0;

  bool operator==(const ClassMetrics&) const = default;
};

struct NamedClass {
  std::string name;
  ClassMetrics metrics;

  bool operator==(const NamedClass&) const = default;
};

/// Per-file result. `aggregate` sums the class counts field by field but
/// carries the whole-file line count.
struct FileSourceMetrics {
  std::vector<NamedClass> classes;
  ClassMetrics aggregate;
  bool degraded = false;

  bool operator==(const FileSourceMetrics&) const = default;
};

/// Syntactic class metrics for a Java-family source file.
///
/// Comments and literals are stripped by the lexer, then brace matching
/// recovers class, interface, enum and record bodies. Counting rules:
///  - methods: declarations at member depth whose parenthesized signature is
///    followed by a body (constructors included, abstract methods excluded);
///  - instance variables: member-depth field declarators, `int a, b;` is two;
///  - for loops: every `for` keyword inside the class body, enhanced-for
///    included;
///  - lines of code: lines holding code, i.e. neither blank nor comment-only.
/// Nested classes are separate entries and are not counted in their outer
/// class. Unbalanced input yields no classes, whole-file LOC and `degraded`.
FileSourceMetrics analyze_source(std::string_view content);

}  // namespace evocity::srcmetrics
