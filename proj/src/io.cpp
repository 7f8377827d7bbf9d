#include "o3v/io.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <unistd.h>

#include "o3v/errors.hpp"

namespace o3v::io {

namespace fs = std::filesystem;

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace {

void dump_rec(const json& j, int indent, int depth, std::string& out) {
  const auto pad = [&](int d) {
    if (indent >= 0) {
      out += '\n';
      out.append(static_cast<std::size_t>(indent * d), ' ');
    }
  };
  switch (j.type()) {
    case json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += '{';
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ',';
        first = false;
        pad(depth + 1);
        out += json(it.key()).dump();
        out += indent >= 0 ? ": " : ":";
        dump_rec(it.value(), indent, depth + 1, out);
      }
      pad(depth);
      out += '}';
      return;
    }
    case json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      out += '[';
      bool first = true;
      for (const auto& e : j) {
        if (!first) out += ',';
        first = false;
        pad(depth + 1);
        dump_rec(e, indent, depth + 1, out);
      }
      pad(depth);
      out += ']';
      return;
    }
    case json::value_t::number_float: {
      const double x = j.get<double>();
      if (!std::isfinite(x)) {
        out += "null";
        return;
      }
      std::string s = format_number(x);
      if (s.find_first_of(".eE") == std::string::npos) s += ".0";
      out += s;
      return;
    }
    default:
      out += j.dump();
  }
}

}  // namespace

std::string dump_json(const json& j, int indent) {
  std::string out;
  dump_rec(j, indent, 0, out);
  out += '\n';
  return out;
}

void write_atomic(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    os.write(content.data(), static_cast<std::streamsize>(content.size()));
    os.flush();
    if (!os) {
      os.close();
      fs::remove(tmp);
      throw std::runtime_error("write failed: " + tmp.string());
    }
  }
  fs::rename(tmp, path);
}

std::string profile_csv(const RadialSolution& sol) {
  std::string out = "r,u,du_dr\n";
  for (const auto& p : sol.grid) {
    out += format_number(p.r) + ',' + format_number(p.u) + ',' + format_number(p.du) + '\n';
  }
  return out;
}

std::string beta_curve_csv(const BetaCurve& curve) {
  std::string out = "s,beta,bc_type\n";
  for (const auto& p : curve.samples) {
    out += format_number(p.s) + ',' + (p.failed ? std::string("nan") : format_number(p.beta)) + ',' +
           (p.failed ? std::string("Failed") : to_string(p.bc_type)) + '\n';
  }
  return out;
}

std::string sweep_csv(const std::vector<SweepRecord>& records) {
  std::size_t nv = 0;
  for (const auto& r : records) nv = std::max(nv, r.per_vortex.size());
  std::string out = "epsilon,sup_K,inf_K,total_abs_mass";
  for (std::size_t k = 0; k < nv; ++k) {
    const std::string p = "v" + std::to_string(k) + "_";
    out += ',' + p + "mass," + p + "pohozaev_residual," + p + "quantization";
  }
  out += '\n';
  for (const auto& r : records) {
    out += format_number(r.epsilon) + ',' + format_number(r.sup_K) + ',' + format_number(r.inf_K) + ',' +
           format_number(r.total_abs_mass);
    for (std::size_t k = 0; k < nv; ++k) {
      if (k < r.per_vortex.size()) {
        const auto& d = r.per_vortex[k];
        out += ',' + format_number(d.mass) + ',' + format_number(d.pohozaev.residual) + ',' +
               format_number(d.quantization);
      } else {
        out += ",nan,nan,nan";
      }
    }
    out += '\n';
  }
  return out;
}

std::string field_slice_csv(const TorusField& field, int i) {
  const TorusDomain& d = field.domain;
  if (i < 0 || i >= d.n1()) throw std::out_of_range("slice row out of range");
  std::string out = "x,y,u0,v,u\n";
  for (int j = 0; j < d.n2(); ++j) {
    const Point2 p = d.node(i, j);
    const std::size_t k = d.index(i, j);
    out += format_number(p.x) + ',' + format_number(p.y) + ',' + format_number(field.u0[k]) + ',' +
           format_number(field.v[k]) + ',' + format_number(field.u(k)) + '\n';
  }
  return out;
}

json to_json(const VortexSet& vs) {
  json arr = json::array();
  for (std::size_t id = 0; id < vs.size(); ++id) {
    int sign = 0;
    const Vortex& v = vs.at(id, &sign);
    arr.push_back({{"x", v.p.x}, {"y", v.p.y}, {"m", v.multiplicity}, {"sign", sign}});
  }
  return arr;
}

void export_field(const TorusField& field, const fs::path& base) {
  static_assert(std::endian::native == std::endian::little, "field export assumes little-endian hosts");
  const TorusDomain& d = field.domain;
  const std::size_t n = d.size();
  std::string blob(2 * n * sizeof(double), '\0');
  std::memcpy(blob.data(), field.u0.data(), n * sizeof(double));
  std::memcpy(blob.data() + n * sizeof(double), field.v.data(), n * sizeof(double));

  fs::path bin = base;
  bin += ".bin";
  fs::path side = base;
  side += ".json";
  write_atomic(bin, blob);

  json j;
  j["format"] = "o3v-field";
  j["data"] = bin.filename().string();
  j["dtype"] = "float64";
  j["byte_order"] = "little";
  j["layout"] = "row-major";
  j["shape"] = {d.n1(), d.n2()};
  j["periods"] = {d.L1(), d.L2()};
  j["blocks"] = json::array({{{"name", "u0"}, {"offset", 0}},
                             {{"name", "v"}, {"offset", n * sizeof(double)}}});
  j["tau"] = field.params.tau();
  j["epsilon"] = field.params.epsilon();
  j["nonlinearity"] = to_string(field.params.nonlinearity());
  j["vortices"] = to_json(field.vortices);
  j["method"] = field.method;
  j["residual_norm"] = field.residual_norm;
  j["tolerance"] = field.tolerance;
  write_atomic(side, dump_json(j));
}

namespace {

template <class T>
T need(const json& j, const char* key, const fs::path& src) {
  if (!j.contains(key)) throw ConfigError(src.string() + ": missing '" + key + "'", std::string("/") + key);
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(src.string() + ": bad value for '" + key + "'", std::string("/") + key);
  }
}

}  // namespace

TorusField import_field(const fs::path& sidecar) {
  std::ifstream is(sidecar);
  if (!is) throw ConfigError("cannot open field sidecar " + sidecar.string(), "");
  json j;
  try {
    j = json::parse(is);
  } catch (const json::parse_error& e) {
    throw ConfigError(sidecar.string() + ": " + e.what(), "");
  }
  if (need<std::string>(j, "format", sidecar) != "o3v-field") throw ConfigError("not an o3v field sidecar", "/format");
  const auto shape = need<std::vector<int>>(j, "shape", sidecar);
  const auto periods = need<std::vector<double>>(j, "periods", sidecar);
  if (shape.size() != 2 || periods.size() != 2) throw ConfigError("shape and periods need two entries", "/shape");
  const TorusDomain d(periods[0], periods[1], shape[0], shape[1]);

  VortexSet vs;
  const json& vj = j.at("vortices");
  for (std::size_t k = 0; k < vj.size(); ++k) {
    const Point2 p{vj[k].at("x").get<double>(), vj[k].at("y").get<double>()};
    const int m = vj[k].at("m").get<int>();
    if (vj[k].at("sign").get<int>() > 0) {
      vs.add_positive(p, m);
    } else {
      vs.add_negative(p, m);
    }
  }

  const std::size_t n = d.size();
  std::vector<std::size_t> offsets(2, 0);
  for (const auto& b : j.at("blocks")) {
    const auto name = b.at("name").get<std::string>();
    if (name == "u0") offsets[0] = b.at("offset").get<std::size_t>();
    if (name == "v") offsets[1] = b.at("offset").get<std::size_t>();
  }
  const fs::path bin = sidecar.parent_path() / need<std::string>(j, "data", sidecar);
  std::ifstream bs(bin, std::ios::binary);
  if (!bs) throw ConfigError("cannot open field data " + bin.string(), "/data");

  Background bg = make_background(d, vs);
  TorusField f;
  f.domain = d;
  f.vortices = bg.snapped;
  f.params = ModelParams(need<double>(j, "tau", sidecar), need<double>(j, "epsilon", sidecar),
                         nonlinearity_from_string(need<std::string>(j, "nonlinearity", sidecar)));
  f.u0 = Grid(d);
  f.v = Grid(d);
  bs.seekg(static_cast<std::streamoff>(offsets[0]));
  bs.read(reinterpret_cast<char*>(f.u0.data()), static_cast<std::streamsize>(n * sizeof(double)));
  bs.seekg(static_cast<std::streamoff>(offsets[1]));
  bs.read(reinterpret_cast<char*>(f.v.data()), static_cast<std::streamsize>(n * sizeof(double)));
  if (!bs) throw ConfigError("field data truncated: " + bin.string(), "/blocks");
  f.nodes = bg.nodes;
  f.gamma = bg.gamma;
  f.warnings = bg.warnings;
  f.method = j.value("method", std::string("imported"));
  f.tolerance = j.value("tolerance", 0.0);
  f.residual_norm = max_abs(residual(f));
  return f;
}

json to_json(const RadialSolution& sol) {
  json j;
  j["s"] = sol.s;
  j["nu"] = sol.nu;
  j["tau"] = sol.tau;
  j["orientation"] = sol.orientation == SourceOrientation::NegativeVortex ? "negative" : "positive";
  j["beta"] = sol.beta;
  j["bc_type"] = to_string(sol.bc_type);
  j["r_end"] = sol.diagnostics.r_end;
  j["samples"] = sol.grid.size();
  j["steps"] = sol.diagnostics.steps;
  j["rejected"] = sol.diagnostics.rejected;
  j["warnings"] = sol.warnings;
  return j;
}

json to_json(const BetaCurve& curve) {
  json j;
  j["tau"] = curve.tau;
  j["monotone_violations"] = curve.monotone_violations;
  json arr = json::array();
  int failed = 0;
  for (const auto& p : curve.samples) {
    json e{{"s", p.s}, {"beta", p.beta}, {"bc_type", to_string(p.bc_type)}};
    if (p.failed) {
      e["failed"] = true;
      e["error"] = p.error;
      ++failed;
    }
    arr.push_back(e);
  }
  j["failed"] = failed;
  j["samples"] = arr;
  return j;
}

json to_json(const TorusField& field) {
  json j;
  j["periods"] = {field.domain.L1(), field.domain.L2()};
  j["grid"] = {field.domain.n1(), field.domain.n2()};
  j["tau"] = field.params.tau();
  j["epsilon"] = field.params.epsilon();
  j["nonlinearity"] = to_string(field.params.nonlinearity());
  j["vortices"] = to_json(field.vortices);
  j["method"] = field.method;
  j["iterations"] = field.iterations;
  j["residual_norm"] = field.residual_norm;
  j["tolerance"] = field.tolerance;
  j["schedule"] = field.schedule;
  j["total_mass"] = total_mass(field);
  j["expected_mass"] = 4.0 * M_PI * (field.vortices.N1() - field.vortices.N2());
  j["warnings"] = field.warnings;
  return j;
}

json to_json(const EigenResult& r, bool with_vector) {
  json j;
  j["eigenvalue"] = r.eigenvalue;
  j["rayleigh"] = r.rayleigh;
  j["residual_norm"] = r.residual_norm;
  j["tolerance"] = r.tolerance;
  j["iterations"] = r.iterations;
  j["positive"] = r.positive;
  j["sensitivity"] = r.sensitivity ? json(*r.sensitivity) : json(nullptr);
  j["reliable"] = r.reliable;
  j["warnings"] = r.warnings;
  if (with_vector) j["eigenvector"] = r.eigenvector;
  return j;
}

json to_json(const IdentityResult& r) { return {{"lhs", r.lhs}, {"rhs", r.rhs}, {"rel_err", r.rel_err}}; }

json to_json(const PohozaevValue& p) {
  return {{"volume", p.volume}, {"boundary", p.boundary}, {"residual", p.residual}};
}

json to_json(const SweepRecord& r) {
  json j;
  j["epsilon"] = r.epsilon;
  j["converged"] = r.converged;
  if (!r.error.empty()) j["error"] = r.error;
  j["sup_K"] = r.sup_K;
  j["inf_K"] = r.inf_K;
  j["total_abs_mass"] = r.total_abs_mass;
  j["total_mass"] = r.total_mass;
  j["exterior_mass"] = r.exterior_mass;
  j["residual_norm"] = r.residual_norm;
  json pv = json::array();
  for (const auto& d : r.per_vortex) {
    pv.push_back({{"id", d.id},
                  {"sign", d.sign},
                  {"m", d.multiplicity},
                  {"mass", d.mass},
                  {"pohozaev", to_json(d.pohozaev)},
                  {"quantization", d.quantization},
                  {"beta_combination", d.beta_combination}});
  }
  j["per_vortex"] = pv;
  if (r.eigen) j["eigen"] = to_json(*r.eigen);
  if (r.stability) j["stability"] = to_string(*r.stability);
  return j;
}

json to_json(const AlternativeVerdict& v) {
  json j;
  j["kind"] = to_string(v.kind);
  j["sup_abs_decreasing"] = v.sup_abs_decreasing;
  j["final_sup_abs"] = v.final_sup_abs;
  j["decay_test"] = {{"applicable", v.decay.applicable},
                     {"passed", v.decay.passed},
                     {"C_fit", v.decay.C_fit},
                     {"ratios", v.decay.ratios},
                     {"pair_index", v.decay.pair_index}};
  j["mass_max"] = v.mass_max;
  j["mass_min"] = v.mass_min;
  j["evidence"] = v.evidence;
  return j;
}

}  // namespace o3v::io
