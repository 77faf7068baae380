#include "rfcmpc/mps_io.hpp"

#include <istream>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <unordered_map>

#include <fmt/core.h>

#include "rfcmpc/errors.hpp"
#include "rfcmpc/numfmt.hpp"

namespace rfcmpc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr const char* kObjRow = "OBJ";

std::string sos_name(std::size_t g) { return fmt::format("s{}", g); }

void field_line(std::ostream& out, std::string_view a, std::string_view b, std::string_view c) {
  out << fmt::format("    {:<8}  {:<8}  {}\n", a, b, c);
}

void bound_line(std::ostream& out, std::string_view kind, std::string_view var, std::string_view value) {
  if (value.empty())
    out << fmt::format(" {:<2} BND       {}\n", kind, var);
  else
    out << fmt::format(" {:<2} BND       {:<8}  {}\n", kind, var, value);
}

std::vector<std::string> tokens(const std::string& line) {
  std::istringstream is(line);
  std::vector<std::string> out;
  for (std::string t; is >> t;) out.push_back(t);
  return out;
}

std::optional<std::size_t> parse_name(std::string_view name, char prefix) {
  if (name.size() < 2 || name[0] != prefix) return std::nullopt;
  std::size_t v = 0;
  for (char c : name.substr(1)) {
    if (c < '0' || c > '9') return std::nullopt;
    v = v * 10 + static_cast<std::size_t>(c - '0');
  }
  if (name.size() > 2 && name[1] == '0') return std::nullopt;
  return v;
}

}  // namespace

void write_mps(const MilpModel& model, std::ostream& out) {
  const std::size_t n = model.num_variables();
  const auto& rows = model.constraints();
  // Column-major view of the rows.
  std::vector<std::vector<std::pair<std::size_t, double>>> cols(n);
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (const auto& t : rows[i].terms) cols[t.var].emplace_back(i, t.coef);

  out << fmt::format("NAME          {}\n", model.name);
  out << "ROWS\n";
  out << fmt::format(" N  {}\n", kObjRow);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const char* s = rows[i].sense == Sense::LessEqual ? "L" : rows[i].sense == Sense::Equal ? "E" : "G";
    out << fmt::format(" {}  {}\n", s, row_name(i));
  }
  out << "COLUMNS\n";
  bool in_int = false;
  std::size_t markers = 0;
  for (std::size_t j = 0; j < n; ++j) {
    const bool is_int = model.variables()[j].kind == VarKind::Binary;
    if (is_int != in_int) {
      out << fmt::format("    MARKER{}  'MARKER'  {}\n", markers++, is_int ? "'INTORG'" : "'INTEND'");
      in_int = is_int;
    }
    const std::string name = variable_name(j);
    const double c = model.objective()[j];
    if (c != 0.0 || cols[j].empty()) field_line(out, name, kObjRow, format_exact(c));
    for (const auto& [i, v] : cols[j]) field_line(out, name, row_name(i), format_exact(v));
  }
  if (in_int) out << fmt::format("    MARKER{}  'MARKER'  'INTEND'\n", markers++);
  out << "RHS\n";
  for (std::size_t i = 0; i < rows.size(); ++i)
    if (rows[i].rhs != 0.0) field_line(out, "RHS", row_name(i), format_exact(rows[i].rhs));
  out << "BOUNDS\n";
  for (std::size_t j = 0; j < n; ++j) {
    const Variable& v = model.variables()[j];
    const std::string name = variable_name(j);
    if (v.kind == VarKind::Binary && v.lower == 0.0 && v.upper == 1.0) {
      bound_line(out, "BV", name, "");
      continue;
    }
    if (v.lower == -kInf && v.upper == kInf) {
      bound_line(out, "FR", name, "");
      continue;
    }
    if (v.lower == v.upper) {
      bound_line(out, "FX", name, format_exact(v.lower));
      continue;
    }
    if (v.lower == -kInf)
      bound_line(out, "MI", name, "");
    else if (v.lower != 0.0)
      bound_line(out, "LO", name, format_exact(v.lower));
    if (v.upper != kInf) bound_line(out, "UP", name, format_exact(v.upper));
  }
  if (!model.sos2_groups().empty()) {
    out << "SOS\n";
    for (std::size_t g = 0; g < model.sos2_groups().size(); ++g) {
      const std::string set = sos_name(g);
      out << fmt::format(" S2 SOS       {}\n", set);
      const auto& group = model.sos2_groups()[g];
      for (std::size_t l = 0; l < group.size(); ++l)
        field_line(out, set, variable_name(group[l]), fmt::format("{}", l + 1));
    }
  }
  out << "ENDATA\n";
}

std::string to_mps(const MilpModel& model) {
  std::ostringstream os;
  write_mps(model, os);
  return os.str();
}

MilpModel read_mps(std::istream& in) {
  enum class Section { None, Rows, Columns, Rhs, Bounds, Sos, End };
  Section section = Section::None;
  MilpModel model;
  std::vector<Sense> senses;
  std::vector<std::vector<LinearTerm>> terms;
  std::vector<double> rhs;
  bool in_int = false;
  bool saw_obj = false;
  std::size_t line_no = 0;
  std::vector<std::vector<std::size_t>> groups;

  auto fail = [&](const std::string& what) -> InputError {
    return InputError(fmt::format("MPS line {}: {}", line_no, what));
  };
  auto row_index = [&](const std::string& name) {
    const auto i = parse_name(name, 'c');
    if (!i || *i >= senses.size()) throw fail(fmt::format("unknown row '{}'", name));
    return *i;
  };
  auto var_index = [&](const std::string& name) {
    const auto j = parse_name(name, 'x');
    if (!j || *j >= model.num_variables()) throw fail(fmt::format("unknown column '{}'", name));
    return *j;
  };

  for (std::string line; std::getline(in, line);) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '*') continue;
    const auto tok = tokens(line);
    if (tok.empty()) continue;
    if (line[0] != ' ') {
      const std::string& head = tok[0];
      if (head == "NAME") model.name = tok.size() > 1 ? tok[1] : "";
      else if (head == "ROWS") section = Section::Rows;
      else if (head == "COLUMNS") section = Section::Columns;
      else if (head == "RHS") section = Section::Rhs;
      else if (head == "BOUNDS") section = Section::Bounds;
      else if (head == "SOS") section = Section::Sos;
      else if (head == "ENDATA") { section = Section::End; break; }
      else throw fail(fmt::format("unsupported section '{}'", head));
      continue;
    }
    switch (section) {
      case Section::Rows: {
        if (tok.size() != 2) throw fail("row line needs a type and a name");
        if (tok[0] == "N") {
          if (saw_obj || tok[1] != kObjRow) throw fail("exactly one objective row named OBJ expected");
          saw_obj = true;
          break;
        }
        const auto i = parse_name(tok[1], 'c');
        if (!i || *i != senses.size()) throw fail(fmt::format("row '{}' out of order", tok[1]));
        if (tok[0] == "L") senses.push_back(Sense::LessEqual);
        else if (tok[0] == "E") senses.push_back(Sense::Equal);
        else if (tok[0] == "G") senses.push_back(Sense::GreaterEqual);
        else throw fail(fmt::format("row type '{}'", tok[0]));
        terms.emplace_back();
        rhs.push_back(0.0);
        break;
      }
      case Section::Columns: {
        if (tok.size() == 3 && tok[1] == "'MARKER'") {
          if (tok[2] == "'INTORG'") in_int = true;
          else if (tok[2] == "'INTEND'") in_int = false;
          else throw fail("bad marker");
          break;
        }
        if (tok.size() != 3) throw fail("column line needs name, row, value");
        const auto j = parse_name(tok[0], 'x');
        if (!j) throw fail(fmt::format("column name '{}'", tok[0]));
        if (*j == model.num_variables()) {
          if (in_int) model.add_binary();
          else model.add_continuous(0.0, kInf);
        } else if (*j + 1 != model.num_variables()) {
          throw fail(fmt::format("column '{}' out of order", tok[0]));
        }
        const double v = parse_double(tok[2], "MPS coefficient");
        if (tok[1] == kObjRow) model.set_objective(*j, v);
        else terms[row_index(tok[1])].push_back({*j, v});
        break;
      }
      case Section::Rhs: {
        if (tok.size() != 3) throw fail("RHS line needs set, row, value");
        rhs[row_index(tok[1])] = parse_double(tok[2], "MPS rhs");
        break;
      }
      case Section::Bounds: {
        if (tok.size() < 3) throw fail("bound line too short");
        const std::size_t j = var_index(tok[2]);
        const Variable cur = model.variables()[j];
        const std::string& kind = tok[0];
        auto value = [&]() {
          if (tok.size() != 4) throw fail(fmt::format("{} bound needs a value", kind));
          return parse_double(tok[3], "MPS bound");
        };
        if (kind == "BV") {
          if (cur.kind != VarKind::Binary) throw fail("BV on a non-integer column");
          model.set_bounds(j, 0.0, 1.0);
        } else if (kind == "FR") model.set_bounds(j, -kInf, kInf);
        else if (kind == "MI") model.set_bounds(j, -kInf, cur.upper);
        else if (kind == "PL") model.set_bounds(j, cur.lower, kInf);
        else if (kind == "FX") { const double v = value(); model.set_bounds(j, v, v); }
        else if (kind == "LO") model.set_bounds(j, value(), cur.upper);
        else if (kind == "UP") model.set_bounds(j, cur.lower, value());
        else throw fail(fmt::format("bound type '{}'", kind));
        break;
      }
      case Section::Sos: {
        if (tok[0] == "S2") {
          if (tok.size() < 3) throw fail("SOS header needs a name");
          groups.emplace_back();
        } else {
          if (groups.empty() || tok.size() != 3) throw fail("SOS member outside a set");
          groups.back().push_back(var_index(tok[1]));
        }
        break;
      }
      default: throw fail("data outside a section");
    }
  }
  if (section != Section::End) throw InputError("MPS: missing ENDATA");
  if (!saw_obj) throw InputError("MPS: no objective row");
  for (std::size_t i = 0; i < senses.size(); ++i) model.add_constraint(std::move(terms[i]), senses[i], rhs[i]);
  for (auto& g : groups) model.add_sos2(std::move(g));
  try {
    model.validate();
  } catch (const std::invalid_argument& e) {
    throw InputError(fmt::format("MPS: {}", e.what()));
  }
  return model;
}

void write_solution(std::span<const double> values, std::ostream& out) {
  for (std::size_t j = 0; j < values.size(); ++j)
    out << variable_name(j) << ' ' << format_exact(values[j]) << '\n';
}

SolutionFile read_solution(std::istream& in, std::size_t num_variables) {
  SolutionFile sol;
  std::vector<double> values(num_variables, 0.0);
  std::vector<bool> seen(num_variables, false);
  std::size_t count = 0;
  std::size_t line_no = 0;
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    const auto tok = tokens(line);
    if (tok.empty()) continue;
    if (tok.size() != 2)
      throw InputError(fmt::format("solution line {}: expected '<name> <value>'", line_no));
    if (tok[0] == "status") {
      if (line_no != 1 && count > 0) throw InputError("solution: status line must come first");
      sol.status = tok[1];
      continue;
    }
    const auto j = parse_name(tok[0], 'x');
    if (!j || *j >= num_variables)
      throw InputError(fmt::format("solution line {}: unknown variable '{}'", line_no, tok[0]));
    if (seen[*j]) throw InputError(fmt::format("solution line {}: duplicate '{}'", line_no, tok[0]));
    seen[*j] = true;
    values[*j] = parse_double(tok[1], "solution value");
    ++count;
  }
  if (count != 0 && count != num_variables)
    throw InputError(fmt::format("solution: {} of {} variables assigned", count, num_variables));
  if (count == 0 && sol.status == "optimal")
    throw InputError("solution: no values and no status");
  if (count > 0) sol.values = std::move(values);
  return sol;
}

}  // namespace rfcmpc
