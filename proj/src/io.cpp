#include "dyad/io.hpp"

#include <charconv>
#include <fstream>
#include <json.hpp>
#include <map>
#include <sstream>

#include "dyad/util.hpp"

namespace dyad {

namespace {

using nlohmann::json;

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur += ch;
    }
  }
  out.push_back(cur);
  return out;
}

double parse_double(const std::string& s, const std::string& what) {
  double v = 0.0;
  const auto* begin = s.data();
  const auto* end = s.data() + s.size();
  const auto res = std::from_chars(begin, end, v);
  if (res.ec != std::errc{} || res.ptr != end)
    throw std::invalid_argument("cannot parse " + what + ": '" + s + "'");
  return v;
}

long parse_long(const std::string& s, const std::string& what) {
  long v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
    throw std::invalid_argument("cannot parse " + what + ": '" + s + "'");
  return v;
}

void check_keys(const json& j, std::initializer_list<const char*> allowed,
                const std::string& context) {
  for (const auto& [key, value] : j.items()) {
    bool ok = false;
    for (const char* a : allowed)
      if (key == a) ok = true;
    if (!ok)
      throw std::invalid_argument("unknown key '" + key + "' in " + context);
  }
}

}  // namespace

DyadPanel parse_panel(std::istream& in) {
  std::string line;
  if (!std::getline(in, line))
    throw std::invalid_argument("panel file is empty");
  const auto header = split_csv(line);
  const std::vector<std::string> fixed{"dyad_id", "member", "time", "y"};
  if (header.size() < fixed.size())
    throw std::invalid_argument("panel header must start with dyad_id,member,time,y");
  for (std::size_t c = 0; c < fixed.size(); ++c)
    if (header[c] != fixed[c])
      throw std::invalid_argument("panel header column " + std::to_string(c + 1) +
                                  " must be '" + fixed[c] + "'");
  std::vector<std::string> cov_names(header.begin() + 4, header.end());

  struct Cell {
    bool has_y = false;
    double y = 0.0;
    std::vector<double> x;
  };
  std::map<std::string, int> dyad_index;
  std::vector<std::string> dyad_order;
  // cells[(dyad, member)][time-1]
  std::map<std::pair<int, int>, std::map<int, Cell>> cells;
  int max_time = 0;

  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto f = split_csv(line);
    if (f.size() != header.size())
      throw std::invalid_argument("line " + std::to_string(line_no) + ": expected " +
                                  std::to_string(header.size()) + " fields, got " +
                                  std::to_string(f.size()));
    const std::string& id = f[0];
    const long member = parse_long(f[1], "member");
    if (member != 1 && member != 2)
      throw std::invalid_argument("line " + std::to_string(line_no) +
                                  ": member must be 1 or 2");
    const long time = parse_long(f[2], "time");
    if (time < 1)
      throw std::invalid_argument("line " + std::to_string(line_no) +
                                  ": time must be >= 1");
    if (!dyad_index.count(id)) {
      dyad_index[id] = static_cast<int>(dyad_order.size());
      dyad_order.push_back(id);
    }
    Cell cell;
    if (!f[3].empty()) {
      cell.y = parse_double(f[3], "outcome");
      cell.has_y = true;
    }
    for (std::size_t c = 4; c < f.size(); ++c) {
      if (f[c].empty())
        throw std::invalid_argument("line " + std::to_string(line_no) +
                                    ": covariate '" + header[c] +
                                    "' is missing (covariates must be complete)");
      cell.x.push_back(parse_double(f[c], "covariate " + header[c]));
    }
    auto& slot = cells[{dyad_index[id], static_cast<int>(member) - 1}];
    if (slot.count(static_cast<int>(time)))
      throw std::invalid_argument("duplicate row for dyad " + id + " member " +
                                  f[1] + " time " + f[2]);
    slot[static_cast<int>(time)] = std::move(cell);
    max_time = std::max(max_time, static_cast<int>(time));
  }
  if (dyad_order.empty()) throw std::invalid_argument("panel has no data rows");
  if (max_time < 2)
    throw std::invalid_argument("panel needs at least two waves");

  DyadPanel panel = DyadPanel::empty(static_cast<int>(dyad_order.size()),
                                     max_time, cov_names);
  panel.dyad_ids = dyad_order;
  for (int i = 0; i < panel.n_dyads; ++i)
    for (int k = 0; k < kMembers; ++k) {
      const auto it = cells.find({i, k});
      if (it == cells.end() || static_cast<int>(it->second.size()) != max_time)
        throw std::invalid_argument("dyad " + dyad_order[static_cast<std::size_t>(i)] +
                                    " member " + std::to_string(k + 1) +
                                    " must have one row per time 1.." +
                                    std::to_string(max_time));
      int d = max_time + 1;
      for (int j = 1; j <= max_time; ++j) {
        const auto ct = it->second.find(j);
        if (ct == it->second.end())
          throw std::invalid_argument("dyad " + dyad_order[static_cast<std::size_t>(i)] +
                                      " member " + std::to_string(k + 1) +
                                      " is missing time " + std::to_string(j));
        const Cell& cell = ct->second;
        if (cell.has_y) {
          if (d <= j)
            throw std::invalid_argument(
                "non-monotone missingness for dyad " +
                dyad_order[static_cast<std::size_t>(i)] + " member " +
                std::to_string(k + 1) + ": outcome present at time " +
                std::to_string(j) + " after a missing outcome");
          panel.y_at(k, i, j) = cell.y;
        } else {
          if (j == 1)
            throw std::invalid_argument("baseline outcome missing for dyad " +
                                        dyad_order[static_cast<std::size_t>(i)] +
                                        " member " + std::to_string(k + 1));
          d = std::min(d, j);
        }
        for (int c = 0; c < panel.n_covs(); ++c)
          panel.x_at(k, i, j, c) = cell.x[static_cast<std::size_t>(c)];
      }
      panel.dropout[k][i] = d;
    }
  panel.validate();
  return panel;
}

DyadPanel parse_panel_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open " + path.string());
  return parse_panel(in);
}

void write_panel(const DyadPanel& panel, std::ostream& out) {
  out << "dyad_id,member,time,y";
  for (const auto& c : panel.cov_names) out << ',' << c;
  out << '\n';
  for (int i = 0; i < panel.n_dyads; ++i)
    for (int k = 0; k < kMembers; ++k)
      for (int j = 1; j <= panel.n_times; ++j) {
        out << panel.dyad_ids[static_cast<std::size_t>(i)] << ',' << (k + 1)
            << ',' << j << ',';
        if (panel.observed(k, i, j)) out << fmt_g17(panel.y_at(k, i, j));
        for (double v : panel.x_at(k, i, j)) out << ',' << fmt_g17(v);
        out << '\n';
      }
}

void write_panel_file(const DyadPanel& panel,
                      const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("cannot open " + path.string());
  write_panel(panel, out);
}

// ---------------------------------------------------------------------------

RunConfig RunConfig::from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("config is not valid JSON: ") +
                                e.what());
  }
  RunConfig cfg;
  check_keys(j, {"model", "priors", "sampler"}, "config");
  if (j.contains("model")) {
    const auto& m = j["model"];
    check_keys(m, {"q", "hazard_form", "covariates", "hazard_covariates"},
               "model");
    cfg.q = m.value("q", 1);
    cfg.hazard_form = m.value("hazard_form", std::string("lag1"));
    if (cfg.hazard_form != "lag1" && cfg.hazard_form != "lag1_squared" &&
        cfg.hazard_form != "full_history")
      throw std::invalid_argument("hazard_form must be lag1, lag1_squared or "
                                  "full_history");
    auto read_cols = [&](const char* key,
                         std::array<std::vector<std::string>, 2>& dst) {
      if (!m.contains(key)) return;
      const auto& c = m[key];
      check_keys(c, {"member1", "member2"}, key);
      for (int k = 0; k < kMembers; ++k) {
        const std::string mk = "member" + std::to_string(k + 1);
        if (c.contains(mk))
          dst[k] = c[mk].get<std::vector<std::string>>();
      }
    };
    read_cols("covariates", cfg.covariates);
    read_cols("hazard_covariates", cfg.hazard_covariates);
  }
  if (j.contains("priors")) {
    const auto& p = j["priors"];
    check_keys(p, {"a", "b", "phi_prior"}, "priors");
    cfg.sampler.prior.ig_shape = p.value("a", 0.1);
    cfg.sampler.prior.ig_scale = p.value("b", 0.1);
    if (p.contains("phi_prior")) {
      const auto& pp = p["phi_prior"];
      check_keys(pp, {"mean", "variance"}, "phi_prior");
      cfg.sampler.prior.phi_prior =
          NormalPrior{pp.value("mean", 0.0), pp.value("variance", 0.01)};
    }
  }
  if (j.contains("sampler")) {
    const auto& s = j["sampler"];
    check_keys(s,
               {"n_iter", "burn_in", "thin", "seed", "adaptation", "fixed_phi"},
               "sampler");
    cfg.sampler.n_iter = s.value("n_iter", cfg.sampler.n_iter);
    cfg.sampler.burn_in = s.value("burn_in", cfg.sampler.burn_in);
    cfg.sampler.thin = s.value("thin", cfg.sampler.thin);
    cfg.sampler.seed = s.value("seed", cfg.sampler.seed);
    if (s.contains("adaptation")) {
      const auto& a = s["adaptation"];
      check_keys(a, {"block_scale", "scalar_scale", "enabled"}, "adaptation");
      cfg.sampler.block_scale0 = a.value("block_scale", cfg.sampler.block_scale0);
      cfg.sampler.scalar_scale0 =
          a.value("scalar_scale", cfg.sampler.scalar_scale0);
      cfg.sampler.adapt = a.value("enabled", true);
    }
    if (s.contains("fixed_phi"))
      cfg.sampler.fixed_phi = s["fixed_phi"].get<double>();
  }
  cfg.sampler.validate();
  return cfg;
}

RunConfig RunConfig::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return from_json_text(os.str());
}

ModelSpec RunConfig::model_spec(const DyadPanel& panel) const {
  ModelSpec spec;
  spec.order = q;
  auto resolve = [&](const std::vector<std::string>& names) {
    std::vector<int> cols;
    for (const auto& n : names) {
      const auto it =
          std::find(panel.cov_names.begin(), panel.cov_names.end(), n);
      if (it == panel.cov_names.end())
        throw std::invalid_argument("covariate column '" + n +
                                    "' not present in the panel");
      cols.push_back(static_cast<int>(it - panel.cov_names.begin()));
    }
    return cols;
  };
  for (int k = 0; k < kMembers; ++k) {
    spec.own_cols[k] = resolve(covariates[k]);
    spec.hazard_cols[k] = resolve(hazard_covariates[k]);
  }
  if (hazard_form == "lag1") {
    spec.lag_transform = LagTransform::identity;
    spec.hazard_lags = 1;
  } else if (hazard_form == "lag1_squared") {
    spec.lag_transform = LagTransform::square;
    spec.hazard_lags = 1;
  } else {  // full_history
    spec.lag_transform = LagTransform::identity;
    spec.hazard_lags = panel.n_times - 1;
  }
  return spec;
}

// ---------------------------------------------------------------------------

void write_draws_csv(const ChainOutput& chain,
                     const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("cannot open " + path.string());
  for (std::size_t c = 0; c < chain.names.size(); ++c)
    out << (c ? "," : "") << chain.names[c];
  out << '\n';
  for (int r = 0; r < chain.n_retained; ++r) {
    for (std::size_t c = 0; c < chain.names.size(); ++c)
      out << (c ? "," : "") << fmt_g17(chain.at(r, static_cast<int>(c)));
    out << '\n';
  }
}

void write_loglik_csv(const ChainOutput& chain,
                      const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("cannot open " + path.string());
  out << "iteration,joint_loglik\n";
  for (std::size_t t = 0; t < chain.loglik_trace.size(); ++t)
    out << (t + 1) << ',' << fmt_g17(chain.loglik_trace[t]) << '\n';
}

void write_summary_json(const ChainOutput& chain,
                        const std::map<std::string, std::string>& meta,
                        const std::filesystem::path& path) {
  json doc;
  for (const auto& [k, v] : meta) doc["meta"][k] = v;
  for (std::size_t c = 0; c < chain.names.size(); ++c) {
    const auto& s = chain.summaries[c];
    json entry;
    entry["mean"] = s.mean;
    entry["sd"] = s.sd;
    entry["q025"] = s.q025;
    entry["q975"] = s.q975;
    entry["ess"] = effective_sample_size(chain.column(chain.names[c]));
    doc["params"][chain.names[c]] = entry;
  }
  for (const auto& [k, v] : chain.acceptance) doc["acceptance"][k] = v;
  doc["n_retained"] = chain.n_retained;
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("cannot open " + path.string());
  out << doc.dump(2) << '\n';
}

void write_report_csv(const ReplicateReport& report,
                      const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("cannot open " + path.string());
  out << "parameter,method,bias,se,coverage\n";
  for (const auto& param : report.params)
    for (const auto& method : report.methods) {
      const auto& cell = report.cells.at(method).at(param);
      out << param << ',' << method << ',' << fmt_g17(cell.bias) << ','
          << fmt_g17(cell.se) << ',' << fmt_g17(cell.coverage) << '\n';
    }
}

void write_report_json(const ReplicateReport& report,
                       const std::filesystem::path& path) {
  json doc;
  doc["n_replicates"] = report.n_replicates;
  doc["n_failed"] = report.n_failed;
  for (const auto& method : report.methods)
    for (const auto& param : report.params) {
      const auto& cell = report.cells.at(method).at(param);
      json entry;
      entry["bias"] = cell.bias;
      entry["se"] = cell.se;
      entry["coverage"] = cell.coverage;
      doc["cells"][method][param] = entry;
    }
  for (const auto& [wave, frac] : report.dyad_dropout_by_wave)
    doc["dropout"]["dyad"]["wave" + std::to_string(wave)] = frac;
  for (int k = 0; k < kMembers; ++k)
    for (const auto& [wave, frac] : report.member_dropout_by_wave[k])
      doc["dropout"]["member" + std::to_string(k + 1)]
         ["wave" + std::to_string(wave)] = frac;
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("cannot open " + path.string());
  out << doc.dump(2) << '\n';
}

void write_sweep_csv(const std::vector<SweepRow>& rows,
                     const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("cannot open " + path.string());
  out << "phi_mean,parameter,mean,q025,q975,sd,mcse,status\n";
  for (const auto& r : rows) {
    out << fmt_g17(r.phi_mean) << ',' << r.param << ',';
    if (r.ok)
      out << fmt_g17(r.mean) << ',' << fmt_g17(r.q025) << ','
          << fmt_g17(r.q975) << ',' << fmt_g17(r.sd) << ',' << fmt_g17(r.mcse)
          << ",ok";
    else
      out << ",,,,,failed: " << r.error;
    out << '\n';
  }
}

void write_ig_csv(const std::vector<IgRow>& rows,
                  const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("cannot open " + path.string());
  out << "a,b,parameter,mean,q025,q975,sd,mcse,status\n";
  for (const auto& r : rows) {
    out << fmt_g17(r.a) << ',' << fmt_g17(r.b) << ',' << r.param << ',';
    if (r.ok)
      out << fmt_g17(r.mean) << ',' << fmt_g17(r.q025) << ','
          << fmt_g17(r.q975) << ',' << fmt_g17(r.sd) << ',' << fmt_g17(r.mcse)
          << ",ok";
    else
      out << ",,,,,failed: " << r.error;
    out << '\n';
  }
}

}  // namespace dyad
