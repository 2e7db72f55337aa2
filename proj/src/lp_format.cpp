#include "dsom/lp_format.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace dsom {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_expr(std::ostream& os, const std::vector<std::pair<int, double>>& terms,
                const std::vector<std::string>& names) {
  bool first = true;
  int on_line = 0;
  for (const auto& [col, v] : terms) {
    if (first) {
      if (v < 0) os << "- ";
      first = false;
    } else {
      os << (v < 0 ? " - " : " + ");
    }
    os << num(std::abs(v)) << " " << names[col];
    if (++on_line % 8 == 0) os << "\n   ";
  }
  if (first) os << "0";
}

}  // namespace

void write_lp_file(std::ostream& os, const BoundedLp& lp,
                   const std::vector<std::string>& col_names,
                   const std::vector<std::string>& row_names,
                   const std::vector<uint8_t>& integer_cols) {
  const int m = lp.rows(), n = lp.cols();

  // collect rows from the column-major matrix
  std::vector<std::vector<std::pair<int, double>>> rows(m);
  for (int j = 0; j < n; ++j)
    for (Eigen::SparseMatrix<double>::InnerIterator it(lp.A, j); it; ++it)
      rows[it.row()].emplace_back(j, it.value());

  os << "\\ LP export\n";
  os << "Minimize\n obj:";
  {
    std::vector<std::pair<int, double>> terms;
    for (int j = 0; j < n; ++j)
      if (lp.obj[j] != 0.0) terms.emplace_back(j, lp.obj[j]);
    os << " ";
    write_expr(os, terms, col_names);
    os << "\n";
  }
  os << "Subject To\n";
  for (int i = 0; i < m; ++i) {
    os << " " << row_names[i] << ": ";
    write_expr(os, rows[i], col_names);
    switch (lp.sense[i]) {
      case '<': os << " <= "; break;
      case '>': os << " >= "; break;
      default: os << " = "; break;
    }
    os << num(lp.rhs[i]) << "\n";
  }
  os << "Bounds\n";
  for (int j = 0; j < n; ++j) {
    const double lo = lp.lo[j], hi = lp.hi[j];
    if (lo == -kInf && hi == kInf) {
      os << " " << col_names[j] << " free\n";
    } else if (lo == hi) {
      os << " " << col_names[j] << " = " << num(lo) << "\n";
    } else if (lo == -kInf) {
      os << " " << col_names[j] << " <= " << num(hi) << "\n";
    } else if (hi == kInf) {
      os << " " << col_names[j] << " >= " << num(lo) << "\n";
    } else {
      os << " " << num(lo) << " <= " << col_names[j] << " <= " << num(hi) << "\n";
    }
  }
  bool any_int = false;
  for (uint8_t b : integer_cols)
    if (b) any_int = true;
  if (any_int) {
    os << "Binaries\n";
    int on_line = 0;
    for (int j = 0; j < n; ++j)
      if (integer_cols[j]) {
        os << " " << col_names[j];
        if (++on_line % 8 == 0) os << "\n";
      }
    os << "\n";
  }
  os << "End\n";
}

void write_lp_file(std::ostream& os, const Model& model) {
  std::vector<std::string> cols, rows;
  for (int j = 0; j < model.lp.cols(); ++j) cols.push_back(model.column_name(j));
  for (int i = 0; i < model.lp.rows(); ++i) rows.push_back(model.row_name(i));
  write_lp_file(os, model.lp, cols, rows, model.integer_cols);
}

namespace {

struct Tokenizer {
  std::vector<std::string> tokens;
  size_t pos = 0;

  explicit Tokenizer(std::istream& is) {
    std::string line;
    while (std::getline(is, line)) {
      const size_t c = line.find('\\');
      if (c != std::string::npos) line.resize(c);
      std::istringstream ls(line);
      std::string tok;
      while (ls >> tok) {
        // split relational operators stuck to numbers/names
        size_t start = 0;
        for (size_t i = 0; i < tok.size(); ++i) {
          if (tok[i] == '<' || tok[i] == '>' || tok[i] == '=' || tok[i] == ':' ||
              tok[i] == '+' || tok[i] == '-') {
            if (tok[i] == '-' || tok[i] == '+') {
              // keep sign attached to a following number ("-3e2"), split else
              if (i + 1 < tok.size() &&
                  (std::isdigit(static_cast<unsigned char>(tok[i + 1])) ||
                   tok[i + 1] == '.') &&
                  (i == start)) {
                continue;
              }
            }
            if (i > start) tokens.push_back(tok.substr(start, i - start));
            std::string op(1, tok[i]);
            if ((tok[i] == '<' || tok[i] == '>') && i + 1 < tok.size() &&
                tok[i + 1] == '=') {
              op += '=';
              ++i;
            }
            tokens.push_back(op);
            start = i + 1;
          }
        }
        if (start < tok.size()) tokens.push_back(tok.substr(start));
      }
    }
  }

  bool done() const { return pos >= tokens.size(); }
  const std::string& peek() const { return tokens[pos]; }
  std::string next() { return tokens[pos++]; }
};

bool is_number(const std::string& s) {
  char* end = nullptr;
  std::strtod(s.c_str(), &end);
  return end == s.c_str() + s.size() && !s.empty();
}

std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

}  // namespace

LpFileContents read_lp_file(std::istream& is) {
  Tokenizer tz(is);
  LpFileContents out;
  std::map<std::string, int> col_of;
  auto col_id = [&](const std::string& name) {
    auto it = col_of.find(name);
    if (it != col_of.end()) return it->second;
    const int id = static_cast<int>(out.col_names.size());
    col_of.emplace(name, id);
    out.col_names.push_back(name);
    return id;
  };

  std::vector<Eigen::Triplet<double>> trips;
  std::vector<double> rhs, obj_terms;
  std::vector<char> sense;
  std::map<int, double> obj;
  std::vector<std::pair<std::string, std::pair<double, double>>> bounds;
  std::vector<std::string> binaries;

  enum Section { none, minimize, subject, in_bounds, in_binaries } sec = none;
  std::string pending_row;

  auto parse_expr = [&](std::vector<std::pair<int, double>>& terms,
                        std::string& stop) {
    double sign = 1.0;
    double coef = 1.0;
    bool have_coef = false;
    while (!tz.done()) {
      std::string t = tz.peek();
      const std::string lt = lower(t);
      if (lt == "subject" || lt == "st" || lt == "bounds" || lt == "binaries" ||
          lt == "binary" || lt == "end" || lt == "general" || t == "<=" ||
          t == ">=" || t == "=" || t == "<" || t == ">") {
        stop = t;
        return;
      }
      tz.next();
      if (t == "+") { sign = 1.0; continue; }
      if (t == "-") { sign = -sign; continue; }
      if (is_number(t)) {
        coef = std::strtod(t.c_str(), nullptr);
        have_coef = true;
        continue;
      }
      // a name: close the pending term
      terms.emplace_back(col_id(t), sign * (have_coef ? coef : 1.0));
      sign = 1.0;
      coef = 1.0;
      have_coef = false;
    }
    stop.clear();
  };

  while (!tz.done()) {
    const std::string t = tz.peek();
    const std::string lt = lower(t);
    if (lt == "minimize" || lt == "min") { tz.next(); sec = minimize; continue; }
    if (lt == "subject") { tz.next(); if (!tz.done() && lower(tz.peek()) == "to") tz.next(); sec = subject; continue; }
    if (lt == "st") { tz.next(); sec = subject; continue; }
    if (lt == "bounds") { tz.next(); sec = in_bounds; continue; }
    if (lt == "binaries" || lt == "binary") { tz.next(); sec = in_binaries; continue; }
    if (lt == "end") { tz.next(); break; }

    if (sec == minimize) {
      // optional "obj:" label
      if (!tz.done()) {
        std::string name = tz.next();
        if (!tz.done() && tz.peek() == ":") {
          tz.next();
        } else {
          // not a label; put it back by reparsing below
          --tz.pos;
        }
      }
      std::vector<std::pair<int, double>> terms;
      std::string stop;
      parse_expr(terms, stop);
      for (const auto& [c, v] : terms) obj[c] += v;
      sec = none;
      continue;
    }
    if (sec == subject) {
      std::string row_name = tz.next();
      if (!tz.done() && tz.peek() == ":") tz.next();
      else throw std::runtime_error("lp read: expected row label");
      std::vector<std::pair<int, double>> terms;
      std::string stop;
      parse_expr(terms, stop);
      if (stop != "<=" && stop != ">=" && stop != "=" )
        throw std::runtime_error("lp read: expected relational operator");
      tz.next();
      const std::string rhs_tok = tz.next();
      if (!is_number(rhs_tok)) throw std::runtime_error("lp read: expected rhs");
      const int row = static_cast<int>(rhs.size());
      for (const auto& [c, v] : terms) trips.emplace_back(row, c, v);
      rhs.push_back(std::strtod(rhs_tok.c_str(), nullptr));
      sense.push_back(stop == "<=" ? '<' : stop == ">=" ? '>' : '=');
      out.row_names.push_back(row_name);
      continue;
    }
    if (sec == in_bounds) {
      // forms: "lo <= x <= hi" | "x free" | "x = v" | "x <= hi" | "x >= lo"
      std::string first = tz.next();
      if (is_number(first)) {
        const double lo = std::strtod(first.c_str(), nullptr);
        if (tz.next() != "<=") throw std::runtime_error("lp read: bad bound");
        const std::string name = tz.next();
        if (tz.next() != "<=") throw std::runtime_error("lp read: bad bound");
        const double hi = std::strtod(tz.next().c_str(), nullptr);
        bounds.push_back({name, {lo, hi}});
      } else {
        const std::string name = first;
        if (tz.done()) throw std::runtime_error("lp read: bad bound");
        const std::string op = tz.next();
        if (lower(op) == "free") {
          bounds.push_back({name, {-kInf, kInf}});
        } else if (op == "<=") {
          bounds.push_back({name, {0.0, std::strtod(tz.next().c_str(), nullptr)}});
        } else if (op == ">=") {
          bounds.push_back({name, {std::strtod(tz.next().c_str(), nullptr), kInf}});
        } else if (op == "=") {
          const double v = std::strtod(tz.next().c_str(), nullptr);
          bounds.push_back({name, {v, v}});
        } else {
          throw std::runtime_error("lp read: bad bound operator " + op);
        }
      }
      continue;
    }
    if (sec == in_binaries) {
      binaries.push_back(tz.next());
      continue;
    }
    throw std::runtime_error("lp read: unexpected token " + t);
  }

  const int n = static_cast<int>(out.col_names.size());
  const int m = static_cast<int>(rhs.size());
  out.lp.A.resize(m, n);
  out.lp.A.setFromTriplets(trips.begin(), trips.end());
  out.lp.rhs = Eigen::Map<const Eigen::VectorXd>(rhs.data(), m);
  out.lp.sense = sense;
  out.lp.lo = Eigen::VectorXd::Zero(n);
  out.lp.hi = Eigen::VectorXd::Constant(n, kInf);
  out.lp.obj = Eigen::VectorXd::Zero(n);
  for (const auto& [c, v] : obj) out.lp.obj[c] = v;
  for (const auto& [name, b] : bounds) {
    auto it = col_of.find(name);
    if (it == col_of.end()) continue;  // bound on a column absent from rows/obj
    out.lp.lo[it->second] = b.first;
    out.lp.hi[it->second] = b.second;
  }
  out.integer_cols.assign(n, 0);
  for (const std::string& name : binaries) {
    auto it = col_of.find(name);
    if (it != col_of.end()) out.integer_cols[it->second] = 1;
  }
  return out;
}

}  // namespace dsom
