#include "rfcmpc/snapshot.hpp"

#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include <fmt/core.h>

#include "rfcmpc/errors.hpp"
#include "rfcmpc/numfmt.hpp"

namespace rfcmpc {

namespace {

void write_list(std::ostream& out, const char* key, const std::vector<double>& v) {
  out << key;
  for (double x : v) out << ' ' << format_exact(x);
  out << '\n';
}

}  // namespace

void write_snapshot(const Snapshot& snap, std::ostream& out) {
  out << "rfcmpc-snapshot 1\n";
  out << "soh " << format_exact(snap.state.soh) << '\n';
  out << "mode " << to_string(snap.state.mode) << '\n';
  out << "switch_history";
  for (Mode m : snap.state.switch_history) out << ' ' << to_string(m);
  out << '\n';
  write_list(out, "prices", snap.prices);
  out << "scenarios " << snap.scenarios.size() << '\n';
  for (std::size_t s = 0; s < snap.scenarios.size(); ++s) {
    out << "scenario " << format_exact(snap.scenarios.probabilities[s]);
    if (s < snap.scenarios.source_index.size()) out << ' ' << snap.scenarios.source_index[s];
    out << '\n';
    write_list(out, "load", snap.scenarios.scenarios[s].load);
    write_list(out, "res", snap.scenarios.scenarios[s].res);
  }
}

Snapshot read_snapshot(std::istream& in) {
  Snapshot snap;
  std::size_t line_no = 0;
  std::string line;
  auto fail = [&](const std::string& what) {
    return InputError(fmt::format("snapshot line {}: {}", line_no, what));
  };
  auto next = [&](const std::string& key) {
    while (std::getline(in, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty()) continue;
      std::istringstream is(line);
      std::string head;
      is >> head;
      if (head != key) throw fail(fmt::format("expected '{}', got '{}'", key, head));
      std::vector<std::string> rest;
      for (std::string t; is >> t;) rest.push_back(t);
      return rest;
    }
    throw fail(fmt::format("unexpected end of file, expected '{}'", key));
  };
  auto numbers = [&](const std::vector<std::string>& tok, const char* what) {
    std::vector<double> v;
    for (const auto& t : tok) v.push_back(parse_double(t, what));
    return v;
  };
  auto one = [&](const std::vector<std::string>& tok) {
    if (tok.size() != 1) throw fail("expected one value");
    return tok[0];
  };
  auto mode = [&](const std::string& text) {
    const auto m = parse_mode(text);
    if (!m) throw fail(fmt::format("unknown mode '{}'", text));
    return *m;
  };

  if (one(next("rfcmpc-snapshot")) != "1") throw fail("unsupported snapshot version");
  snap.state.soh = parse_double(one(next("soh")), "soh");
  snap.state.mode = mode(one(next("mode")));
  for (const auto& t : next("switch_history")) snap.state.switch_history.push_back(mode(t));
  snap.prices = numbers(next("prices"), "price");
  const long long n = parse_int(one(next("scenarios")), "scenario count");
  if (n < 1) throw fail("need at least one scenario");
  for (long long s = 0; s < n; ++s) {
    const auto head = next("scenario");
    if (head.empty() || head.size() > 2) throw fail("scenario line needs a probability and an optional source index");
    snap.scenarios.probabilities.push_back(parse_double(head[0], "probability"));
    if (head.size() == 2) snap.scenarios.source_index.push_back(static_cast<std::size_t>(parse_int(head[1], "source index")));
    JointPath p;
    p.load = numbers(next("load"), "load");
    p.res = numbers(next("res"), "res");
    if (p.load.size() != p.res.size()) throw fail("load and res lengths differ");
    snap.scenarios.scenarios.push_back(std::move(p));
  }
  if (!snap.scenarios.source_index.empty() && snap.scenarios.source_index.size() != snap.scenarios.size())
    throw InputError("snapshot: source indices given for some scenarios only");
  try {
    snap.scenarios.validate(1e-9);
  } catch (const std::invalid_argument& e) {
    throw InputError(fmt::format("snapshot: {}", e.what()));
  }
  if (snap.prices.size() < snap.scenarios.horizon())
    throw InputError(fmt::format("snapshot: {} prices for a horizon of {}", snap.prices.size(), snap.scenarios.horizon()));
  return snap;
}

}  // namespace rfcmpc
