#include "scate/data.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace scate {

namespace {

std::string row_msg(const char* what, std::size_t row) {
  return std::string(what) + " at row " + std::to_string(row);
}

std::vector<std::string> split_line(const std::string& line, char delim) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == delim) {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

int parse_binary(const std::string& tok, const char* name, std::size_t row) {
  if (tok == "0") return 0;
  if (tok == "1") return 1;
  throw std::invalid_argument(row_msg(
      (std::string(name) + " must be 0 or 1, got '" + tok + "'").c_str(), row));
}

// fixed, locale-independent float formatting so written files are stable
std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

void validate(const Dataset& ds) {
  if (ds.obs.empty()) throw std::invalid_argument("dataset has no rows");
  const std::size_t d = ds.covariate_names.size();
  bool seen_arm[2] = {false, false};
  for (std::size_t i = 0; i < ds.obs.size(); ++i) {
    const Observation& o = ds.obs[i];
    if (o.x.size() != d)
      throw std::invalid_argument(row_msg("covariate dimension mismatch", i));
    if (o.z != 0 && o.z != 1)
      throw std::invalid_argument(row_msg("instrument must be 0/1", i));
    if (o.s != 0 && o.s != 1)
      throw std::invalid_argument(row_msg("selection must be 0/1", i));
    if ((o.s == 1) == (o.a == Tri::Undefined))
      throw std::invalid_argument(
          o.s == 1 ? row_msg("treatment undefined while selection=1", i)
                   : row_msg("treatment defined while selection=0", i));
    if (o.s == 1 && o.y == Tri::Undefined)
      throw std::invalid_argument(row_msg("outcome undefined while selection=1", i));
    for (double v : o.x)
      if (!std::isfinite(v))
        throw std::invalid_argument(row_msg("non-finite covariate", i));
    seen_arm[o.z] = true;
  }
  if (!seen_arm[0] || !seen_arm[1])
    throw std::invalid_argument("both instrument arms must be present");
}

Dataset load_dataset(const std::string& path, const Schema& schema) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);

  std::string header;
  if (!std::getline(in, header))
    throw std::invalid_argument("empty file: " + path);
  const auto cols = split_line(header, schema.delimiter);
  std::unordered_map<std::string, std::size_t> idx;
  for (std::size_t j = 0; j < cols.size(); ++j) idx[cols[j]] = j;

  auto col_of = [&](const std::string& name) {
    auto it = idx.find(name);
    if (it == idx.end())
      throw std::invalid_argument("column '" + name + "' not found in " + path);
    return it->second;
  };
  const std::size_t zc = col_of(schema.z_col), sc = col_of(schema.s_col);
  const std::size_t ac = col_of(schema.a_col), yc = col_of(schema.y_col);
  std::vector<std::size_t> xc;
  for (const auto& name : schema.covariate_cols) xc.push_back(col_of(name));

  Dataset ds;
  ds.covariate_names = schema.covariate_cols;
  std::string line;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto toks = split_line(line, schema.delimiter);
    if (toks.size() != cols.size())
      throw std::invalid_argument(row_msg("wrong number of fields", row));
    Observation o;
    o.z = parse_binary(toks[zc], "instrument", row);
    o.s = parse_binary(toks[sc], "selection", row);
    auto tri_of = [&](std::size_t c, const char* name) {
      const std::string& t = toks[c];
      if (t == schema.missing_token) return Tri::Undefined;
      return parse_binary(t, name, row) == 1 ? Tri::One : Tri::Zero;
    };
    o.a = tri_of(ac, "treatment");
    o.y = tri_of(yc, "outcome");
    for (std::size_t c : xc) {
      const std::string& t = toks[c];
      if (t == schema.missing_token)
        throw std::invalid_argument(row_msg("missing covariate", row));
      std::size_t pos = 0;
      double v = 0;
      try {
        v = std::stod(t, &pos);
      } catch (const std::exception&) {
        pos = 0;
      }
      if (pos != t.size())
        throw std::invalid_argument(row_msg("non-numeric covariate", row));
      o.x.push_back(v);
    }
    ds.obs.push_back(std::move(o));
    ++row;
  }
  validate(ds);
  return ds;
}

void write_dataset(const Dataset& ds, const std::string& path,
                   const Schema& schema) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  const char d = schema.delimiter;
  out << schema.z_col << d << schema.s_col << d << schema.a_col << d
      << schema.y_col;
  for (const auto& name : ds.covariate_names) out << d << name;
  out << "\n";
  auto tri_tok = [&](Tri t) {
    return t == Tri::Undefined ? schema.missing_token
                               : std::string(t == Tri::One ? "1" : "0");
  };
  for (const Observation& o : ds.obs) {
    out << o.z << d << o.s << d << tri_tok(o.a) << d << tri_tok(o.y);
    for (double v : o.x) out << d << fmt(v);
    out << "\n";
  }
}

Summary summarize(const Dataset& ds) {
  validate(ds);
  Summary sm;
  sm.n = ds.n();
  std::size_t s1[2] = {0, 0}, a1[2] = {0, 0}, y1[2] = {0, 0};
  for (const Observation& o : ds.obs) {
    ++sm.n_arm[o.z];
    if (o.s == 1) {
      ++s1[o.z];
      if (o.a == Tri::One) ++a1[o.z];
      if (o.y == Tri::One) ++y1[o.z];
    }
  }
  for (int z = 0; z < 2; ++z) {
    const double nz = static_cast<double>(sm.n_arm[z]);
    sm.p_s1[z] = nz > 0 ? s1[z] / nz : 0.0;
    sm.p_a1_all[z] = nz > 0 ? a1[z] / nz : 0.0;
    sm.p_a1_sel[z] = s1[z] > 0 ? static_cast<double>(a1[z]) / s1[z] : 0.0;
    sm.p_y1_sel[z] = s1[z] > 0 ? static_cast<double>(y1[z]) / s1[z] : 0.0;
  }
  return sm;
}

namespace {
std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}
}  // namespace

std::string Summary::to_text() const {
  std::ostringstream os;
  os << "n=" << n << "\n";
  for (int z = 0; z < 2; ++z) {
    os << "n_z" << z << "=" << n_arm[z] << "\n"
       << "p_s1_z" << z << "=" << num(p_s1[z]) << "\n"
       << "p_a1_all_z" << z << "=" << num(p_a1_all[z]) << "\n"
       << "p_a1_sel_z" << z << "=" << num(p_a1_sel[z]) << "\n"
       << "p_y1_sel_z" << z << "=" << num(p_y1_sel[z]) << "\n";
  }
  return os.str();
}

std::string Summary::to_json() const {
  std::ostringstream os;
  os << "{\"n\":" << n;
  for (int z = 0; z < 2; ++z) {
    os << ",\"n_z" << z << "\":" << n_arm[z] << ",\"p_s1_z" << z
       << "\":" << num(p_s1[z]) << ",\"p_a1_all_z" << z
       << "\":" << num(p_a1_all[z]) << ",\"p_a1_sel_z" << z
       << "\":" << num(p_a1_sel[z]) << ",\"p_y1_sel_z" << z
       << "\":" << num(p_y1_sel[z]);
  }
  os << "}";
  return os.str();
}

}  // namespace scate
