#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "zinfer/prob_table.hpp"

namespace zinfer {

// Missingness hierarchy of a graphical model.
enum class MissClass { MCAR, MAR, MNAR };
std::string_view miss_class_name(MissClass m);

// Directed acyclic graph over typed nodes:
//   T_k  true value (VarKind::TrueValue)
//   R_k  observability indicator
//   X_k  recorded value, with exactly the two parents T_k and R_k
//   W_k  proxy of R_k (parents: R_k, optionally covariates)
//   C... fully observed covariates
// Structural rules are enforced by validate()/parse().
class MDag {
 public:
  struct Node {
    std::string name;
    VarKind kind;
    int index;  // family subscript k; 0 for unnumbered covariates
  };

  MDag() = default;

  int add_node(std::string name, VarKind kind);
  void add_edge(std::string_view from, std::string_view to);
  void validate() const;

  // Text format: header lines "<kind> <name> [<name> ...]" with kinds
  // true_value | indicator | recorded | proxy | covariate, then one edge per
  // line "A -> B". '#' starts a comment.
  static MDag parse(const std::string& text);

  int node_id(std::string_view name) const;  // UnknownNode when absent
  bool has_node(std::string_view name) const;
  const std::vector<Node>& nodes() const { return nodes_; }
  const std::vector<std::pair<int, int>>& edges() const { return edges_; }
  const std::vector<int>& parents(int v) const { return parents_[static_cast<std::size_t>(v)]; }
  const std::vector<int>& children(int v) const { return children_[static_cast<std::size_t>(v)]; }
  bool has_edge(int from, int to) const;

  // node ids of one kind, sorted by family index
  std::vector<int> nodes_of_kind(VarKind kind) const;
  int find_node(VarKind kind, int index) const;  // -1 when absent
  int n_indicators() const;

 private:
  std::vector<Node> nodes_;
  std::vector<std::pair<int, int>> edges_;
  std::vector<std::vector<int>> parents_;
  std::vector<std::vector<int>> children_;
};

// Free-function spelling of the parser entry point.
inline MDag parse_mdag(const std::string& text) { return MDag::parse(text); }

// True iff every path between A and B is blocked given Z (reachability
// formulation of d-separation).
bool d_separated(const MDag& g, const std::vector<std::string>& a,
                 const std::vector<std::string>& b, const std::vector<std::string>& z);

// MCAR if every R_k is d-separated from all true values marginally, MAR if
// d-separated given the covariates, MNAR otherwise.
MissClass classify_missingness(const MDag& g);

// Verdict of the syntactic full-law identification criterion: identifiable
// iff the graph has no self-censoring edge T_i -> R_i and no colluder
// structure T_j -> R_i <- R_j. Witnesses follow edge declaration order.
struct IdVerdict {
  enum class Kind { Identifiable, SelfCensoring, Colluder };
  Kind kind = Kind::Identifiable;
  int i = 0;  // censored / collided indicator index
  int j = 0;  // colluding partner index
  bool identifiable() const { return kind == Kind::Identifiable; }
  std::string to_string() const;
};

IdVerdict full_law_identifiable(const MDag& g);

// Built-in model graphs, keyed by what they model.
std::vector<std::string> builtin_graph_names();
MDag builtin_graph(std::string_view name);

}  // namespace zinfer
