#include "dcd/io.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace dcd {

namespace {

using nlohmann::json;

std::vector<std::string> split_on(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

double parse_double(const std::string& tok, std::size_t line, std::size_t col) {
  char* end = nullptr;
  double v = std::strtod(tok.c_str(), &end);
  if (end == tok.c_str() || *end != '\0')
    throw ParseError("cannot parse '" + tok + "' as a number", line, col);
  return v;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot open " + path + " for writing", 0);
  return out;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path, 0);
  return in;
}

json matrix_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const json& j) {
  const auto nr = static_cast<Eigen::Index>(j.size());
  if (nr == 0) return Eigen::MatrixXd();
  const auto nc = static_cast<Eigen::Index>(j.at(0).size());
  Eigen::MatrixXd m(nr, nc);
  for (Eigen::Index r = 0; r < nr; ++r)
    for (Eigen::Index c = 0; c < nc; ++c)
      m(r, c) = j.at(static_cast<std::size_t>(r)).at(static_cast<std::size_t>(c)).get<double>();
  return m;
}

}  // namespace

std::string fmt_g17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

DensityGrid grid_from_spec(const GridSpec& spec) {
  return spec.two_d ? make_grid2(spec.xlo, spec.xhi, static_cast<std::size_t>(spec.nx),
                                 spec.ylo, spec.yhi, static_cast<std::size_t>(spec.ny))
                    : make_grid(spec.xlo, spec.xhi, static_cast<std::size_t>(spec.nx));
}

GridSpec spec_from_grid(const DensityGrid& grid) {
  GridSpec s;
  s.two_d = grid.two_d();
  s.xlo = grid.xs.front();
  s.xhi = grid.xs.back();
  s.nx = static_cast<int>(grid.xs.size());
  if (s.two_d) {
    s.ylo = grid.ys.front();
    s.yhi = grid.ys.back();
    s.ny = static_cast<int>(grid.ys.size());
  }
  return s;
}

std::string manifest_to_json(const RunManifest& m) {
  json j;
  j["model"] = to_string(m.model);
  j["mode"] = to_string(m.mode);
  j["J"] = m.J;
  j["master_seed"] = m.master_seed;
  j["iters"] = m.cfg.iters;
  j["burnin"] = m.cfg.burnin;
  j["thin"] = m.cfg.thin;
  j["grid"] = {{"two_d", m.grid.two_d}, {"xlo", m.grid.xlo}, {"xhi", m.grid.xhi},
               {"nx", m.grid.nx},       {"ylo", m.grid.ylo}, {"yhi", m.grid.yhi},
               {"ny", m.grid.ny}};
  j["data_path"] = m.data_path;
  j["trunc_H"] = m.trunc_H;
  j["fractionate_beta"] = m.fractionate_beta;
  j["finite_prior"] = {{"alpha", m.finite_prior.alpha},
                       {"l", m.finite_prior.l},
                       {"nu", m.finite_prior.nu},
                       {"S", matrix_to_json(m.finite_prior.S)}};
  j["dpmn_prior"] = {{"mass", m.dpmn_prior.mass},
                     {"m0", m.dpmn_prior.m0},
                     {"s02", m.dpmn_prior.s02},
                     {"ig_shape", m.dpmn_prior.ig_shape},
                     {"ig_scale", m.dpmn_prior.ig_scale}};
  j["deconv_prior"] = {{"K", m.deconv_prior.K},   {"dp_mass", m.deconv_prior.dp_mass},
                       {"lambda", m.deconv_prior.lambda}, {"t", m.deconv_prior.t},
                       {"xi1", m.deconv_prior.xi1},       {"xi2", m.deconv_prior.xi2}};
  return j.dump(2);
}

RunManifest manifest_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const std::exception& ex) {
    throw ParseError(std::string("manifest is not valid JSON: ") + ex.what(), 0);
  }
  try {
    RunManifest m;
    m.model = model_from_string(j.at("model").get<std::string>());
    m.mode = mode_from_string(j.at("mode").get<std::string>());
    m.J = j.at("J").get<int>();
    m.master_seed = j.at("master_seed").get<std::uint64_t>();
    m.cfg.iters = j.at("iters").get<int>();
    m.cfg.burnin = j.at("burnin").get<int>();
    m.cfg.thin = j.at("thin").get<int>();
    const json& g = j.at("grid");
    m.grid.two_d = g.at("two_d").get<bool>();
    m.grid.xlo = g.at("xlo").get<double>();
    m.grid.xhi = g.at("xhi").get<double>();
    m.grid.nx = g.at("nx").get<int>();
    m.grid.ylo = g.at("ylo").get<double>();
    m.grid.yhi = g.at("yhi").get<double>();
    m.grid.ny = g.at("ny").get<int>();
    m.data_path = j.at("data_path").get<std::string>();
    m.trunc_H = j.at("trunc_H").get<int>();
    m.fractionate_beta = j.at("fractionate_beta").get<bool>();
    const json& fp = j.at("finite_prior");
    m.finite_prior.alpha = fp.at("alpha").get<std::vector<double>>();
    m.finite_prior.l = fp.at("l").get<double>();
    m.finite_prior.nu = fp.at("nu").get<double>();
    m.finite_prior.S = matrix_from_json(fp.at("S"));
    const json& dp = j.at("dpmn_prior");
    m.dpmn_prior.mass = dp.at("mass").get<double>();
    m.dpmn_prior.m0 = dp.at("m0").get<double>();
    m.dpmn_prior.s02 = dp.at("s02").get<double>();
    m.dpmn_prior.ig_shape = dp.at("ig_shape").get<double>();
    m.dpmn_prior.ig_scale = dp.at("ig_scale").get<double>();
    const json& dc = j.at("deconv_prior");
    m.deconv_prior.K = dc.at("K").get<int>();
    m.deconv_prior.dp_mass = dc.at("dp_mass").get<double>();
    m.deconv_prior.lambda = dc.at("lambda").get<double>();
    m.deconv_prior.t = dc.at("t").get<double>();
    m.deconv_prior.xi1 = dc.at("xi1").get<double>();
    m.deconv_prior.xi2 = dc.at("xi2").get<double>();
    return m;
  } catch (const ParseError&) {
    throw;
  } catch (const std::exception& ex) {
    throw ParseError(std::string("manifest field error: ") + ex.what(), 0);
  }
}

void write_manifest(const std::string& path, const RunManifest& m) {
  auto out = open_out(path);
  out << manifest_to_json(m) << "\n";
}

RunManifest read_manifest(const std::string& path) {
  auto in = open_in(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return manifest_from_json(ss.str());
}

void write_density_csv(const std::string& path, const DensityGrid& g) {
  auto out = open_out(path);
  if (g.two_d()) {
    out << "x,y,density\n";
    const std::size_t ny = g.ys.size();
    for (std::size_t ix = 0; ix < g.xs.size(); ++ix)
      for (std::size_t iy = 0; iy < ny; ++iy)
        out << fmt_g17(g.xs[ix]) << ',' << fmt_g17(g.ys[iy]) << ','
            << fmt_g17(g.v[ix * ny + iy]) << '\n';
  } else {
    out << "x,density\n";
    for (std::size_t i = 0; i < g.xs.size(); ++i)
      out << fmt_g17(g.xs[i]) << ',' << fmt_g17(g.v[i]) << '\n';
  }
}

DensityGrid read_density_csv(const std::string& path) {
  auto in = open_in(path);
  std::string line;
  if (!std::getline(in, line)) throw ParseError("empty file: " + path, 0);
  std::vector<std::string> header = split_on(line, ',');
  bool two_d;
  if (header.size() == 2 && header[0] == "x" && header[1] == "density") {
    two_d = false;
  } else if (header.size() == 3 && header[0] == "x" && header[1] == "y" &&
             header[2] == "density") {
    two_d = true;
  } else {
    throw ParseError("expected header 'x,density' or 'x,y,density'", 1);
  }

  DensityGrid g;
  std::size_t lineno = 1;
  std::vector<double> xcol, ycol;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    std::vector<std::string> toks = split_on(line, ',');
    if (toks.size() != header.size())
      throw ParseError("wrong field count", lineno);
    xcol.push_back(parse_double(toks[0], lineno, 1));
    if (two_d) ycol.push_back(parse_double(toks[1], lineno, 2));
    g.v.push_back(parse_double(toks.back(), lineno, toks.size()));
  }
  if (g.v.empty()) throw ParseError("no data rows in " + path, 0);

  if (!two_d) {
    g.xs = std::move(xcol);
  } else {
    // rows are x-major: y cycles fastest, so the leading block shares xcol[0]
    std::size_t ny = 0;
    while (ny < xcol.size() && xcol[ny] == xcol[0]) ++ny;
    if (ny == 0 || g.v.size() % ny != 0)
      throw ParseError("rows do not form a complete x-major grid", 0);
    g.ys.assign(ycol.begin(), ycol.begin() + static_cast<std::ptrdiff_t>(ny));
    for (std::size_t i = 0; i < xcol.size(); i += ny) g.xs.push_back(xcol[i]);
  }
  return g;
}

void write_draws_csv(const std::string& path, const ChainDraws& draws) {
  if (draws.densities.empty()) throw MissingParams("no density draws to write");
  auto out = open_out(path);
  const DensityGrid& g = draws.densities[0];
  if (g.two_d()) {
    const std::size_t ny = g.ys.size();
    for (std::size_t ix = 0; ix < g.xs.size(); ++ix)
      for (std::size_t iy = 0; iy < ny; ++iy)
        out << (ix + iy ? "," : "") << fmt_g17(g.xs[ix]) << ':' << fmt_g17(g.ys[iy]);
  } else {
    for (std::size_t i = 0; i < g.xs.size(); ++i)
      out << (i ? "," : "") << fmt_g17(g.xs[i]);
  }
  out << '\n';
  for (const auto& d : draws.densities) {
    for (std::size_t i = 0; i < d.v.size(); ++i) out << (i ? "," : "") << fmt_g17(d.v[i]);
    out << '\n';
  }
}

std::vector<DensityGrid> read_draws_csv(const std::string& path) {
  auto in = open_in(path);
  std::string line;
  if (!std::getline(in, line)) throw ParseError("empty file: " + path, 0);
  std::vector<std::string> toks = split_on(line, ',');
  DensityGrid axes;
  if (toks.empty()) throw ParseError("empty header", 1);
  const bool two_d = toks[0].find(':') != std::string::npos;
  if (!two_d) {
    for (std::size_t i = 0; i < toks.size(); ++i)
      axes.xs.push_back(parse_double(toks[i], 1, i + 1));
  } else {
    std::vector<double> xcol, ycol;
    for (std::size_t i = 0; i < toks.size(); ++i) {
      std::vector<std::string> parts = split_on(toks[i], ':');
      if (parts.size() != 2) throw ParseError("grid token needs one ':'", 1, i + 1);
      xcol.push_back(parse_double(parts[0], 1, i + 1));
      ycol.push_back(parse_double(parts[1], 1, i + 1));
    }
    std::size_t ny = 0;
    while (ny < xcol.size() && xcol[ny] == xcol[0]) ++ny;
    if (ny == 0 || xcol.size() % ny != 0)
      throw ParseError("header does not form a complete x-major grid", 1);
    axes.ys.assign(ycol.begin(), ycol.begin() + static_cast<std::ptrdiff_t>(ny));
    for (std::size_t i = 0; i < xcol.size(); i += ny) axes.xs.push_back(xcol[i]);
  }

  std::vector<DensityGrid> out;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    std::vector<std::string> row = split_on(line, ',');
    if (row.size() != toks.size())
      throw ParseError("draw row has wrong field count", lineno);
    DensityGrid g = axes;
    g.v.resize(row.size());
    for (std::size_t i = 0; i < row.size(); ++i)
      g.v[i] = parse_double(row[i], lineno, i + 1);
    out.push_back(std::move(g));
  }
  if (out.empty()) throw ParseError("no draw rows in " + path, 0);
  return out;
}

void write_params_csv(const std::string& path, const ChainDraws& draws) {
  if (draws.params.empty()) throw MissingParams("no parameter draws to write");
  auto out = open_out(path);
  for (std::size_t i = 0; i < draws.param_names.size(); ++i)
    out << (i ? "," : "") << draws.param_names[i];
  out << '\n';
  for (const auto& row : draws.params) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << fmt_g17(row[i]);
    out << '\n';
  }
}

std::pair<std::vector<std::string>, std::vector<std::vector<double>>> read_params_csv(
    const std::string& path) {
  auto in = open_in(path);
  std::string line;
  if (!std::getline(in, line)) throw ParseError("empty file: " + path, 0);
  std::vector<std::string> names = split_on(line, ',');
  std::vector<std::vector<double>> rows;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    std::vector<std::string> toks = split_on(line, ',');
    if (toks.size() != names.size())
      throw ParseError("parameter row has wrong field count", lineno);
    std::vector<double> row(toks.size());
    for (std::size_t i = 0; i < toks.size(); ++i)
      row[i] = parse_double(toks[i], lineno, i + 1);
    rows.push_back(std::move(row));
  }
  return {std::move(names), std::move(rows)};
}

void write_run_dir(const std::string& dir, const RunManifest& m,
                   const std::vector<ChainDraws>& shards) {
  std::filesystem::create_directories(dir);
  write_manifest(dir + "/manifest.json", m);
  for (std::size_t s = 0; s < shards.size(); ++s) {
    write_draws_csv(dir + "/draws-" + std::to_string(s + 1) + ".csv", shards[s]);
    if (!shards[s].params.empty())
      write_params_csv(dir + "/params-" + std::to_string(s + 1) + ".csv", shards[s]);
  }
}

std::vector<ChainDraws> read_run_draws(const std::string& dir, const RunManifest& m) {
  std::vector<ChainDraws> out(static_cast<std::size_t>(m.J));
  for (int s = 0; s < m.J; ++s) {
    auto& sh = out[static_cast<std::size_t>(s)];
    sh.densities = read_draws_csv(dir + "/draws-" + std::to_string(s + 1) + ".csv");
    const std::string ppath = dir + "/params-" + std::to_string(s + 1) + ".csv";
    if (std::filesystem::exists(ppath)) {
      auto [names, rows] = read_params_csv(ppath);
      sh.param_names = std::move(names);
      sh.params = std::move(rows);
    }
  }
  return out;
}

void write_sim1_csv(const std::string& path, const Eigen::MatrixXd& data) {
  auto out = open_out(path);
  for (Eigen::Index r = 0; r < data.rows(); ++r)
    out << (r ? "," : "") << "x" << (r + 1);
  out << '\n';
  for (Eigen::Index c = 0; c < data.cols(); ++c) {
    for (Eigen::Index r = 0; r < data.rows(); ++r)
      out << (r ? "," : "") << fmt_g17(data(r, c));
    out << '\n';
  }
}

Eigen::MatrixXd read_matrix_csv(const std::string& path) {
  auto in = open_in(path);
  std::string line;
  if (!std::getline(in, line)) throw ParseError("empty file: " + path, 0);
  const std::size_t p = split_on(line, ',').size();
  std::vector<std::vector<double>> rows;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    std::vector<std::string> toks = split_on(line, ',');
    if (toks.size() != p) throw ParseError("row has wrong field count", lineno);
    std::vector<double> row(p);
    for (std::size_t i = 0; i < p; ++i) row[i] = parse_double(toks[i], lineno, i + 1);
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ParseError("no data rows in " + path, 0);
  Eigen::MatrixXd m(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(rows.size()));
  for (std::size_t c = 0; c < rows.size(); ++c)
    for (std::size_t r = 0; r < p; ++r)
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[c][r];
  return m;
}

void write_sim2_csv(const std::string& path, const std::vector<double>& w,
                    const std::vector<double>& sigma, const std::vector<double>& x_true) {
  auto out = open_out(path);
  out << "w,sigma,x_true\n";
  for (std::size_t i = 0; i < w.size(); ++i)
    out << fmt_g17(w[i]) << ',' << fmt_g17(sigma[i]) << ',' << fmt_g17(x_true[i]) << '\n';
}

}  // namespace dcd
