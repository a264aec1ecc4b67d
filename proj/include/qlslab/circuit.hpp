#ifndef QLSLAB_CIRCUIT_HPP
#define QLSLAB_CIRCUIT_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <map>
#include <numbers>
#include <queue>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "qlslab/qubo.hpp"

namespace qlslab {

enum class GateKind { H, RX, RZ, CNOT, SWAP, U1, U3 };

inline std::string to_string(GateKind k) {
  switch (k) {
    case GateKind::H: return "H";
    case GateKind::RX: return "RX";
    case GateKind::RZ: return "RZ";
    case GateKind::CNOT: return "CNOT";
    case GateKind::SWAP: return "SWAP";
    case GateKind::U1: return "U1";
    case GateKind::U3: return "U3";
  }
  return "?";
}

/// One gate. q1 is used by the two-qubit kinds (q0 = CNOT control).
/// Angle slots: RX/RZ/U1 use a0; U3 uses (a0, a1, a2) = (theta, phi, lambda).
struct Gate {
  GateKind kind = GateKind::H;
  int q0 = 0;
  int q1 = -1;
  double a0 = 0.0, a1 = 0.0, a2 = 0.0;

  bool two_qubit() const { return kind == GateKind::CNOT || kind == GateKind::SWAP; }

  static Gate h(int q) { return {GateKind::H, q}; }
  static Gate rx(int q, double w) { return {GateKind::RX, q, -1, w}; }
  static Gate rz(int q, double w) { return {GateKind::RZ, q, -1, w}; }
  static Gate cnot(int c, int t) { return {GateKind::CNOT, c, t}; }
  static Gate swap(int a, int b) { return {GateKind::SWAP, a, b}; }
  static Gate u1(int q, double lam) { return {GateKind::U1, q, -1, lam}; }
  static Gate u3(int q, double th, double ph, double lam) {
    return {GateKind::U3, q, -1, th, ph, lam};
  }
};

/// Ordered gate list over n_qubits wires. `layout[j]` is the wire holding
/// logical qubit j at the end of the circuit (identity before routing);
/// measured logical bit j is read from wire layout[j].
struct Circuit {
  int n_qubits = 0;
  std::vector<Gate> gates;
  std::vector<int> layout;

  static Circuit empty(int n) {
    Circuit c;
    c.n_qubits = n;
    c.layout.resize(n);
    for (int i = 0; i < n; ++i) c.layout[i] = i;
    return c;
  }
};

inline void check_gate(const Gate& g, int n) {
  if (g.q0 < 0 || g.q0 >= n) throw std::invalid_argument("gate qubit out of range");
  if (g.two_qubit()) {
    if (g.q1 < 0 || g.q1 >= n) throw std::invalid_argument("gate qubit out of range");
    if (g.q0 == g.q1) throw std::invalid_argument("two-qubit gate targets must differ");
  }
  for (double a : {g.a0, g.a1, g.a2})
    if (!std::isfinite(a)) throw std::invalid_argument("non-finite gate angle");
}

inline void validate(const Circuit& c) {
  if (c.n_qubits < 1) throw std::invalid_argument("empty circuit register");
  for (const auto& g : c.gates) check_gate(g, c.n_qubits);
  std::vector<int> seen(c.n_qubits, 0);
  if (static_cast<int>(c.layout.size()) != c.n_qubits)
    throw std::invalid_argument("layout size mismatch");
  for (int w : c.layout) {
    if (w < 0 || w >= c.n_qubits || seen[w]++)
      throw std::invalid_argument("layout is not a permutation");
  }
}

// ---- coupling maps ---------------------------------------------------------

struct CouplingMap {
  int n_physical = 0;
  std::set<std::pair<int, int>> edges;  // stored with first < second
  std::string name = "custom";

  bool has_edge(int a, int b) const {
    if (a > b) std::swap(a, b);
    return edges.count({a, b}) > 0;
  }

  static CouplingMap all_to_all(int n) {
    CouplingMap m;
    m.n_physical = n;
    m.name = "all_to_all";
    for (int a = 0; a < n; ++a)
      for (int b = a + 1; b < n; ++b) m.edges.insert({a, b});
    return m;
  }

  static CouplingMap line(int n) {
    CouplingMap m;
    m.n_physical = n;
    m.name = "line";
    for (int a = 0; a + 1 < n; ++a) m.edges.insert({a, a + 1});
    return m;
  }

  /// 5-qubit T shape: 0-1-2 across the top, 1-3-4 hanging down.
  static CouplingMap t_shaped() {
    CouplingMap m;
    m.n_physical = 5;
    m.name = "t_shaped";
    m.edges = {{0, 1}, {1, 2}, {1, 3}, {3, 4}};
    return m;
  }
};

inline bool is_connected(const CouplingMap& m) {
  if (m.n_physical <= 0) return false;
  std::vector<std::vector<int>> adj(m.n_physical);
  for (const auto& [a, b] : m.edges) {
    if (a < 0 || b < 0 || a >= m.n_physical || b >= m.n_physical)
      throw std::invalid_argument("coupling edge out of range");
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  std::vector<char> vis(m.n_physical, 0);
  std::deque<int> q{0};
  vis[0] = 1;
  int count = 1;
  while (!q.empty()) {
    int u = q.front();
    q.pop_front();
    for (int v : adj[u])
      if (!vis[v]) {
        vis[v] = 1;
        ++count;
        q.push_back(v);
      }
  }
  return count == m.n_physical;
}

// ---- QAOA circuit ----------------------------------------------------------

/// Layer angles: gamma[l] in [0, 2pi], beta[l] in [0, pi].
struct QaoaParams {
  std::vector<double> gamma;
  std::vector<double> beta;

  int p() const { return static_cast<int>(gamma.size()); }
};

inline void validate(const QaoaParams& params, bool allow_out_of_range = false) {
  if (params.gamma.size() != params.beta.size() || params.gamma.empty())
    throw std::invalid_argument("gamma/beta must have equal nonzero length");
  if (allow_out_of_range) return;
  constexpr double pi = std::numbers::pi;
  for (double g : params.gamma)
    if (!(g >= 0.0 && g <= 2 * pi + 1e-12))
      throw std::invalid_argument("gamma out of [0, 2pi]");
  for (double b : params.beta)
    if (!(b >= 0.0 && b <= pi + 1e-12))
      throw std::invalid_argument("beta out of [0, pi]");
}

/// Hadamards, then per layer: RZ(2 h_j gamma) on each qubit with h_j != 0,
/// the CNOT - RZ(2 gamma J_jk) - CNOT gadget for each coupling in ascending
/// (j, k) order, and an RX(2 beta) mixer on every qubit.
inline Circuit build_qaoa_circuit(const IsingProblem& p_ising, const QaoaParams& params,
                                  bool allow_out_of_range_angles = false,
                                  double drop_coupling_below = 0.0) {
  validate(params, allow_out_of_range_angles);
  const int n = p_ising.n();
  Circuit c = Circuit::empty(n);
  for (int q = 0; q < n; ++q) c.gates.push_back(Gate::h(q));
  for (int l = 0; l < params.p(); ++l) {
    const double gamma = params.gamma[l];
    const double beta = params.beta[l];
    for (int q = 0; q < n; ++q)
      if (p_ising.h[q] != 0.0) c.gates.push_back(Gate::rz(q, 2.0 * p_ising.h[q] * gamma));
    for (const auto& [jk, jv] : p_ising.j) {
      if (jv == 0.0 || std::abs(jv) < drop_coupling_below) continue;
      c.gates.push_back(Gate::cnot(jk.first, jk.second));
      c.gates.push_back(Gate::rz(jk.second, 2.0 * gamma * jv));
      c.gates.push_back(Gate::cnot(jk.first, jk.second));
    }
    for (int q = 0; q < n; ++q) c.gates.push_back(Gate::rx(q, 2.0 * beta));
  }
  return c;
}

// ---- routing ---------------------------------------------------------------

enum class RoutingStyle {
  track_layout,  // swaps are not undone; the final layout records the moves
  swap_back,     // mirror swaps restore the layout after every interaction
};

namespace detail {
inline std::vector<int> shortest_path(const CouplingMap& m, int from, int to) {
  std::vector<int> prev(m.n_physical, -1);
  std::vector<char> vis(m.n_physical, 0);
  std::vector<std::vector<int>> adj(m.n_physical);
  for (const auto& [a, b] : m.edges) {
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  for (auto& v : adj) std::sort(v.begin(), v.end());  // deterministic tie-break
  std::deque<int> q{from};
  vis[from] = 1;
  while (!q.empty()) {
    int u = q.front();
    q.pop_front();
    if (u == to) break;
    for (int v : adj[u])
      if (!vis[v]) {
        vis[v] = 1;
        prev[v] = u;
        q.push_back(v);
      }
  }
  if (!vis[to]) throw std::invalid_argument("coupling map is disconnected");
  std::vector<int> path{to};
  while (path.back() != from) path.push_back(prev[path.back()]);
  std::reverse(path.begin(), path.end());
  return path;
}
}  // namespace detail

/// Greedy shortest-path SWAP insertion. Gates of the input are interpreted
/// in the input's own wire frame; the output layout composes the input
/// layout with the wire moves, so measurement relabeling through `layout`
/// always recovers logical bit order. Routing a circuit whose two-qubit
/// gates already sit on edges returns it unchanged.
inline Circuit route(const Circuit& c, const CouplingMap& map,
                     RoutingStyle style = RoutingStyle::track_layout) {
  validate(c);
  if (map.n_physical < c.n_qubits)
    throw std::invalid_argument("coupling map smaller than circuit");
  if (!is_connected(map)) throw std::invalid_argument("coupling map is disconnected");

  const int np = map.n_physical;
  // wire_of[f] = wire currently holding input-frame qubit f
  std::vector<int> wire_of(np);
  for (int i = 0; i < np; ++i) wire_of[i] = i;
  std::vector<int> frame_at(np);  // inverse
  for (int i = 0; i < np; ++i) frame_at[i] = i;

  auto do_swap = [&](int wa, int wb, std::vector<Gate>& out) {
    out.push_back(Gate::swap(wa, wb));
    std::swap(frame_at[wa], frame_at[wb]);
    wire_of[frame_at[wa]] = wa;
    wire_of[frame_at[wb]] = wb;
  };

  Circuit out = Circuit::empty(np);
  for (const auto& g : c.gates) {
    if (!g.two_qubit()) {
      Gate gg = g;
      gg.q0 = wire_of[g.q0];
      out.gates.push_back(gg);
      continue;
    }
    int wa = wire_of[g.q0], wb = wire_of[g.q1];
    std::vector<std::pair<int, int>> moved;
    if (!map.has_edge(wa, wb)) {
      auto path = detail::shortest_path(map, wa, wb);
      // walk q0 along the path until adjacent to q1
      for (std::size_t i = 0; i + 2 < path.size(); ++i) {
        do_swap(path[i], path[i + 1], out.gates);
        moved.push_back({path[i], path[i + 1]});
      }
      wa = wire_of[g.q0];
      wb = wire_of[g.q1];
    }
    Gate gg = g;
    gg.q0 = wa;
    gg.q1 = wb;
    out.gates.push_back(gg);
    if (style == RoutingStyle::swap_back)
      for (auto it = moved.rbegin(); it != moved.rend(); ++it)
        do_swap(it->first, it->second, out.gates);
  }

  // compose: logical -> input frame (c.layout) -> final wire
  out.layout.assign(np, 0);
  std::vector<char> used(np, 0);
  for (int j = 0; j < c.n_qubits; ++j) {
    out.layout[j] = wire_of[c.layout[j]];
    used[out.layout[j]] = 1;
  }
  // pad with the unused wires so the layout stays a permutation
  int next = 0;
  for (int j = c.n_qubits; j < np; ++j) {
    while (used[next]) ++next;
    out.layout[j] = next;
    used[next] = 1;
  }
  return out;
}

// ---- basis rewrite ---------------------------------------------------------

/// Rewrites {H, RX, RZ, CNOT, SWAP} onto {U1, U3, CNOT}:
///   RX(w) = U3(w, -pi/2, pi/2)
///   RZ(w) = U3(pi,0,pi) U1(-w/2) U3(pi,0,pi) U1(w/2)   (exact, no phase slip)
///   H     = U3(pi/2, 0, pi)
///   SWAP  = CNOT(a,b) CNOT(b,a) CNOT(a,b)
inline Circuit rewrite_basis(const Circuit& c) {
  validate(c);
  constexpr double pi = std::numbers::pi;
  Circuit out = Circuit::empty(c.n_qubits);
  out.layout = c.layout;
  for (const auto& g : c.gates) {
    switch (g.kind) {
      case GateKind::H:
        out.gates.push_back(Gate::u3(g.q0, pi / 2, 0.0, pi));
        break;
      case GateKind::RX:
        out.gates.push_back(Gate::u3(g.q0, g.a0, -pi / 2, pi / 2));
        break;
      case GateKind::RZ:
        out.gates.push_back(Gate::u1(g.q0, g.a0 / 2));
        out.gates.push_back(Gate::u3(g.q0, pi, 0.0, pi));
        out.gates.push_back(Gate::u1(g.q0, -g.a0 / 2));
        out.gates.push_back(Gate::u3(g.q0, pi, 0.0, pi));
        break;
      case GateKind::CNOT:
        out.gates.push_back(g);
        break;
      case GateKind::SWAP:
        out.gates.push_back(Gate::cnot(g.q0, g.q1));
        out.gates.push_back(Gate::cnot(g.q1, g.q0));
        out.gates.push_back(Gate::cnot(g.q0, g.q1));
        break;
      default:
        throw std::invalid_argument("rewrite_basis: unsupported gate " + to_string(g.kind));
    }
  }
  return out;
}

// ---- accounting ------------------------------------------------------------

struct GateCountReport {
  std::map<std::string, int> counts;
  int two_qubit = 0;
  int depth = 0;
};

/// Depth is the longest chain under qubit-overlap ordering: each gate lands
/// at 1 + max level of its operand wires.
inline GateCountReport depth_and_counts(const Circuit& c) {
  validate(c);
  GateCountReport r;
  std::vector<int> level(c.n_qubits, 0);
  for (const auto& g : c.gates) {
    ++r.counts[to_string(g.kind)];
    if (g.two_qubit()) ++r.two_qubit;
    int lv = level[g.q0];
    if (g.two_qubit()) lv = std::max(lv, level[g.q1]);
    ++lv;
    level[g.q0] = lv;
    if (g.two_qubit()) level[g.q1] = lv;
    r.depth = std::max(r.depth, lv);
  }
  return r;
}

inline nlohmann::json to_json(const GateCountReport& r) {
  nlohmann::json j;
  j["counts"] = r.counts;
  j["two_qubit_count"] = r.two_qubit;
  j["depth"] = r.depth;
  return j;
}

// ---- text format -----------------------------------------------------------
//
// One gate per line, e.g. `RZ 0 -3.0`, `CNOT 0 1`, with a leading
// `qubits N` header. `#` starts a comment. U2(lambda, phi) is accepted on
// input and stored as U3(pi/2, phi, lambda); it is never written.

inline std::string write_circuit_text(const Circuit& c) {
  std::ostringstream os;
  os << "qubits " << c.n_qubits << "\n";
  bool id_layout = true;
  for (int i = 0; i < c.n_qubits; ++i)
    if (c.layout[i] != i) id_layout = false;
  if (!id_layout) {
    os << "layout";
    for (int w : c.layout) os << ' ' << w;
    os << "\n";
  }
  for (const auto& g : c.gates) {
    os << to_string(g.kind) << ' ' << g.q0;
    if (g.two_qubit()) os << ' ' << g.q1;
    switch (g.kind) {
      case GateKind::RX:
      case GateKind::RZ:
      case GateKind::U1:
        os << ' ' << format_double(g.a0);
        break;
      case GateKind::U3:
        os << ' ' << format_double(g.a0) << ' ' << format_double(g.a1) << ' '
           << format_double(g.a2);
        break;
      default:
        break;
    }
    os << "\n";
  }
  return os.str();
}

inline Circuit read_circuit_text(const std::string& text) {
  constexpr double pi = std::numbers::pi;
  std::istringstream in(text);
  std::string line;
  Circuit c;
  std::vector<Gate> gates;
  std::vector<int> layout;
  int n = -1;
  int max_q = -1;
  while (std::getline(in, line)) {
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string op;
    if (!(ls >> op)) continue;
    if (op == "qubits") {
      ls >> n;
      continue;
    }
    if (op == "layout") {
      int w;
      while (ls >> w) layout.push_back(w);
      continue;
    }
    std::transform(op.begin(), op.end(), op.begin(), ::toupper);
    Gate g;
    auto need = [&](double& v) {
      if (!(ls >> v)) throw std::invalid_argument("bad gate line: " + line);
    };
    int q0 = -1, q1 = -1;
    if (!(ls >> q0)) throw std::invalid_argument("bad gate line: " + line);
    if (op == "H") {
      g = Gate::h(q0);
    } else if (op == "RX" || op == "RZ" || op == "U1") {
      double a;
      need(a);
      g = op == "RX" ? Gate::rx(q0, a) : op == "RZ" ? Gate::rz(q0, a) : Gate::u1(q0, a);
    } else if (op == "U2") {
      double lam, phi;
      need(lam);
      need(phi);
      g = Gate::u3(q0, pi / 2, phi, lam);
    } else if (op == "U3") {
      double th, ph, lam;
      need(th);
      need(ph);
      need(lam);
      g = Gate::u3(q0, th, ph, lam);
    } else if (op == "CNOT" || op == "CX" || op == "SWAP") {
      if (!(ls >> q1)) throw std::invalid_argument("bad gate line: " + line);
      g = op == "SWAP" ? Gate::swap(q0, q1) : Gate::cnot(q0, q1);
    } else {
      throw std::invalid_argument("unknown gate: " + op);
    }
    max_q = std::max({max_q, g.q0, g.q1});
    gates.push_back(g);
  }
  c.n_qubits = n > 0 ? n : max_q + 1;
  if (c.n_qubits < 1) throw std::invalid_argument("circuit text declares no qubits");
  c.gates = std::move(gates);
  if (layout.empty()) {
    c.layout.resize(c.n_qubits);
    for (int i = 0; i < c.n_qubits; ++i) c.layout[i] = i;
  } else {
    c.layout = std::move(layout);
  }
  validate(c);
  return c;
}

}  // namespace qlslab

#endif  // QLSLAB_CIRCUIT_HPP
