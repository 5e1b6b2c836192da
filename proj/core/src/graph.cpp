#include "zinfer/graph.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <deque>
#include <map>
#include <sstream>

namespace zinfer {

namespace {

int trailing_index(const std::string& name) {
  std::size_t pos = name.size();
  while (pos > 0 && std::isdigit(static_cast<unsigned char>(name[pos - 1]))) --pos;
  if (pos == name.size()) return 0;
  return std::stoi(name.substr(pos));
}

}  // namespace

std::string_view miss_class_name(MissClass m) {
  switch (m) {
    case MissClass::MCAR: return "MCAR";
    case MissClass::MAR: return "MAR";
    case MissClass::MNAR: return "MNAR";
  }
  return "?";
}

int MDag::add_node(std::string name, VarKind kind) {
  for (const auto& n : nodes_)
    if (n.name == name) fail(ErrorCode::ParseError, "duplicate node " + name);
  int index = trailing_index(name);
  nodes_.push_back({std::move(name), kind, index});
  parents_.emplace_back();
  children_.emplace_back();
  return static_cast<int>(nodes_.size()) - 1;
}

void MDag::add_edge(std::string_view from, std::string_view to) {
  int u = node_id(from);
  int v = node_id(to);
  if (u == v) fail(ErrorCode::CycleFound, "self-loop at " + std::string(from));
  if (has_edge(u, v)) return;
  edges_.emplace_back(u, v);
  children_[static_cast<std::size_t>(u)].push_back(v);
  parents_[static_cast<std::size_t>(v)].push_back(u);
}

int MDag::node_id(std::string_view name) const {
  for (std::size_t i = 0; i < nodes_.size(); ++i)
    if (nodes_[i].name == name) return static_cast<int>(i);
  fail(ErrorCode::UnknownNode, "no node named " + std::string(name));
}

bool MDag::has_node(std::string_view name) const {
  for (const auto& n : nodes_)
    if (n.name == name) return true;
  return false;
}

bool MDag::has_edge(int from, int to) const {
  const auto& ch = children_[static_cast<std::size_t>(from)];
  return std::find(ch.begin(), ch.end(), to) != ch.end();
}

std::vector<int> MDag::nodes_of_kind(VarKind kind) const {
  std::vector<int> out;
  for (std::size_t i = 0; i < nodes_.size(); ++i)
    if (nodes_[i].kind == kind) out.push_back(static_cast<int>(i));
  std::sort(out.begin(), out.end(), [&](int a, int b) {
    return nodes_[static_cast<std::size_t>(a)].index < nodes_[static_cast<std::size_t>(b)].index;
  });
  return out;
}

int MDag::find_node(VarKind kind, int index) const {
  for (std::size_t i = 0; i < nodes_.size(); ++i)
    if (nodes_[i].kind == kind && nodes_[i].index == index) return static_cast<int>(i);
  return -1;
}

int MDag::n_indicators() const {
  return static_cast<int>(nodes_of_kind(VarKind::Indicator).size());
}

void MDag::validate() const {
  for (const auto& [u, v] : edges_) {
    const Node& from = nodes_[static_cast<std::size_t>(u)];
    const Node& to = nodes_[static_cast<std::size_t>(v)];
    if (to.kind == VarKind::TrueValue &&
        (from.kind == VarKind::Recorded || from.kind == VarKind::Indicator ||
         from.kind == VarKind::Proxy))
      fail(ErrorCode::ForbiddenEdgeIntoCounterfactual,
           from.name + " -> " + to.name + " points into a true value");
  }

  // acyclicity via Kahn's algorithm
  std::vector<int> indeg(nodes_.size(), 0);
  for (const auto& [u, v] : edges_) {
    (void)u;
    ++indeg[static_cast<std::size_t>(v)];
  }
  std::deque<int> queue;
  for (std::size_t i = 0; i < nodes_.size(); ++i)
    if (indeg[i] == 0) queue.push_back(static_cast<int>(i));
  std::size_t seen = 0;
  while (!queue.empty()) {
    int v = queue.front();
    queue.pop_front();
    ++seen;
    for (int c : children(v))
      if (--indeg[static_cast<std::size_t>(c)] == 0) queue.push_back(c);
  }
  if (seen != nodes_.size()) fail(ErrorCode::CycleFound, "graph contains a directed cycle");

  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const Node& n = nodes_[i];
    if (n.kind == VarKind::Recorded) {
      int t = find_node(VarKind::TrueValue, n.index);
      int r = find_node(VarKind::Indicator, n.index);
      const auto& par = parents(static_cast<int>(i));
      bool ok = t >= 0 && r >= 0 && par.size() == 2 &&
                std::find(par.begin(), par.end(), t) != par.end() &&
                std::find(par.begin(), par.end(), r) != par.end();
      if (!ok)
        fail(ErrorCode::BadProxyParents,
             n.name + " must have exactly the two parents T" + std::to_string(n.index) +
                 " and R" + std::to_string(n.index));
    } else if (n.kind == VarKind::Proxy) {
      int r = find_node(VarKind::Indicator, n.index);
      const auto& par = parents(static_cast<int>(i));
      if (r < 0 || std::find(par.begin(), par.end(), r) == par.end())
        fail(ErrorCode::BadProxyParents,
             n.name + " must have R" + std::to_string(n.index) + " among its parents");
      for (int p : par) {
        const Node& pn = nodes_[static_cast<std::size_t>(p)];
        if (p != r && pn.kind != VarKind::Covariate)
          fail(ErrorCode::BadProxyParents,
               n.name + " may only depend on its indicator and covariates");
      }
    } else if (n.kind == VarKind::TrueValue) {
      if (find_node(VarKind::Recorded, n.index) < 0)
        fail(ErrorCode::BadProxyParents,
             n.name + " has no recorded counterpart X" + std::to_string(n.index));
    }
  }
}

MDag MDag::parse(const std::string& text) {
  static const std::map<std::string, VarKind> kinds = {
      {"true_value", VarKind::TrueValue}, {"indicator", VarKind::Indicator},
      {"recorded", VarKind::Recorded},    {"proxy", VarKind::Proxy},
      {"covariate", VarKind::Covariate},
  };
  MDag g;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string first;
    if (!(ls >> first)) continue;
    if (line.find("->") != std::string::npos) {
      std::string arrow, to;
      if (!(ls >> arrow >> to) || arrow != "->")
        fail(ErrorCode::ParseError, "line " + std::to_string(lineno) + ": expected 'A -> B'");
      std::string extra;
      if (ls >> extra)
        fail(ErrorCode::ParseError, "line " + std::to_string(lineno) + ": trailing tokens");
      g.add_edge(first, to);
    } else {
      auto it = kinds.find(first);
      if (it == kinds.end())
        fail(ErrorCode::ParseError,
             "line " + std::to_string(lineno) + ": unknown node kind '" + first + "'");
      std::string name;
      bool any = false;
      while (ls >> name) {
        g.add_node(name, it->second);
        any = true;
      }
      if (!any)
        fail(ErrorCode::ParseError, "line " + std::to_string(lineno) + ": kind without names");
    }
  }
  g.validate();
  return g;
}

bool d_separated(const MDag& g, const std::vector<std::string>& a,
                 const std::vector<std::string>& b, const std::vector<std::string>& z) {
  std::size_t n = g.nodes().size();
  std::vector<char> in_a(n, 0), in_b(n, 0), in_z(n, 0);
  for (const auto& name : a) in_a[static_cast<std::size_t>(g.node_id(name))] = 1;
  for (const auto& name : b) in_b[static_cast<std::size_t>(g.node_id(name))] = 1;
  for (const auto& name : z) in_z[static_cast<std::size_t>(g.node_id(name))] = 1;
  for (std::size_t i = 0; i < n; ++i)
    if (in_a[i] && in_b[i]) return false;

  // Z and its ancestors: colliders open when they have an observed descendant
  std::vector<char> anc_z(n, 0);
  std::deque<int> queue;
  for (std::size_t i = 0; i < n; ++i)
    if (in_z[i]) {
      anc_z[i] = 1;
      queue.push_back(static_cast<int>(i));
    }
  while (!queue.empty()) {
    int v = queue.front();
    queue.pop_front();
    for (int p : g.parents(v))
      if (!anc_z[static_cast<std::size_t>(p)]) {
        anc_z[static_cast<std::size_t>(p)] = 1;
        queue.push_back(p);
      }
  }

  // state: (node, direction entered from): 0 = from child, 1 = from parent
  std::vector<std::array<char, 2>> visited(n, {0, 0});
  std::deque<std::pair<int, int>> frontier;
  for (std::size_t i = 0; i < n; ++i)
    if (in_a[i]) frontier.emplace_back(static_cast<int>(i), 0);
  while (!frontier.empty()) {
    auto [v, dir] = frontier.front();
    frontier.pop_front();
    auto& seen = visited[static_cast<std::size_t>(v)][static_cast<std::size_t>(dir)];
    if (seen) continue;
    seen = 1;
    if (in_b[static_cast<std::size_t>(v)] && !in_z[static_cast<std::size_t>(v)]) return false;
    if (dir == 0) {
      if (!in_z[static_cast<std::size_t>(v)]) {
        for (int p : g.parents(v)) frontier.emplace_back(p, 0);
        for (int c : g.children(v)) frontier.emplace_back(c, 1);
      }
    } else {
      if (!in_z[static_cast<std::size_t>(v)])
        for (int c : g.children(v)) frontier.emplace_back(c, 1);
      if (anc_z[static_cast<std::size_t>(v)])
        for (int p : g.parents(v)) frontier.emplace_back(p, 0);
    }
  }
  return true;
}

MissClass classify_missingness(const MDag& g) {
  std::vector<std::string> indicators, trues, covariates;
  for (const auto& n : g.nodes()) {
    if (n.kind == VarKind::Indicator) indicators.push_back(n.name);
    if (n.kind == VarKind::TrueValue) trues.push_back(n.name);
    if (n.kind == VarKind::Covariate) covariates.push_back(n.name);
  }
  if (indicators.empty() || trues.empty())
    fail(ErrorCode::UnknownNode, "graph has no indicator / true-value nodes");
  if (d_separated(g, indicators, trues, {})) return MissClass::MCAR;
  if (!covariates.empty() && d_separated(g, indicators, trues, covariates))
    return MissClass::MAR;
  return MissClass::MNAR;
}

std::string IdVerdict::to_string() const {
  switch (kind) {
    case Kind::Identifiable: return "identifiable";
    case Kind::SelfCensoring: return "self_censoring(" + std::to_string(i) + ")";
    case Kind::Colluder: return "colluder(" + std::to_string(i) + "," + std::to_string(j) + ")";
  }
  return "?";
}

IdVerdict full_law_identifiable(const MDag& g) {
  // purely syntactic: scan declared edges for T_i -> R_i, then for
  // T_j -> R_i with a companion R_j -> R_i
  for (const auto& [u, v] : g.edges()) {
    const auto& from = g.nodes()[static_cast<std::size_t>(u)];
    const auto& to = g.nodes()[static_cast<std::size_t>(v)];
    if (from.kind == VarKind::TrueValue && to.kind == VarKind::Indicator &&
        from.index == to.index)
      return {IdVerdict::Kind::SelfCensoring, to.index, 0};
  }
  for (const auto& [u, v] : g.edges()) {
    const auto& from = g.nodes()[static_cast<std::size_t>(u)];
    const auto& to = g.nodes()[static_cast<std::size_t>(v)];
    if (from.kind != VarKind::TrueValue || to.kind != VarKind::Indicator) continue;
    int rj = g.find_node(VarKind::Indicator, from.index);
    if (rj >= 0 && g.has_edge(rj, v))
      return {IdVerdict::Kind::Colluder, to.index, from.index};
  }
  return {};
}

std::vector<std::string> builtin_graph_names() {
  return {"mcar_single",
          "mar_single",
          "mnar_chain",
          "zi_mcar_proxy",
          "zi_mar_proxy_stratified",
          "zi_mar_proxy_shared",
          "zi_block_parallel",
          "zi_block_sequential"};
}

MDag builtin_graph(std::string_view name) {
  if (name == "mcar_single")
    return MDag::parse(
        "true_value T1\nindicator R1\nrecorded X1\n"
        "T1 -> X1\nR1 -> X1\n");
  if (name == "mar_single")
    return MDag::parse(
        "true_value T1\nindicator R1\nrecorded X1\ncovariate C\n"
        "T1 -> X1\nR1 -> X1\nC -> T1\nC -> R1\n");
  if (name == "mnar_chain")
    return MDag::parse(
        "true_value T1 T2 T3\nindicator R1 R2 R3\nrecorded X1 X2 X3\n"
        "T1 -> T2\nT2 -> T3\n"
        "R1 -> R2\nR3 -> R2\n"
        "T1 -> R3\nR1 -> R3\n"
        "T1 -> X1\nR1 -> X1\nT2 -> X2\nR2 -> X2\nT3 -> X3\nR3 -> X3\n"
        "T1 -> R2\nT2 -> R3\n");
  if (name == "zi_mcar_proxy")
    return MDag::parse(
        "true_value T1\nindicator R1\nrecorded X1\nproxy W1\n"
        "T1 -> X1\nR1 -> X1\nR1 -> W1\n");
  if (name == "zi_mar_proxy_stratified")
    return MDag::parse(
        "true_value T1\nindicator R1\nrecorded X1\nproxy W1\ncovariate C\n"
        "T1 -> X1\nR1 -> X1\nR1 -> W1\nC -> R1\nC -> T1\nC -> W1\n");
  if (name == "zi_mar_proxy_shared")
    return MDag::parse(
        "true_value T1\nindicator R1\nrecorded X1\nproxy W1\ncovariate C\n"
        "T1 -> X1\nR1 -> X1\nR1 -> W1\nC -> R1\nC -> T1\n");
  if (name == "zi_block_parallel")
    return MDag::parse(
        "true_value T1 T2\nindicator R1 R2\nrecorded X1 X2\nproxy W1 W2\n"
        "T1 -> T2\n"
        "R1 -> W1\nR2 -> W2\n"
        "T1 -> R2\nT2 -> R1\n"
        "T1 -> X1\nR1 -> X1\nT2 -> X2\nR2 -> X2\n");
  if (name == "zi_block_sequential")
    return MDag::parse(
        "true_value T1 T2\nindicator R1 R2\nrecorded X1 X2\nproxy W1 W2\n"
        "T1 -> T2\n"
        "R1 -> R2\nR1 -> W1\nR2 -> W2\n"
        "T1 -> R2\n"
        "T1 -> X1\nR1 -> X1\nT2 -> X2\nR2 -> X2\n");
  fail(ErrorCode::UnknownNode, "no built-in graph named " + std::string(name));
}

}  // namespace zinfer
