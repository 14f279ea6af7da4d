#include "homscore/io.hpp"

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

#include "homscore/errors.hpp"

namespace homscore {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string token;
  std::stringstream ss(line);
  while (std::getline(ss, token, ',')) {
    while (!token.empty() && (token.back() == ' ' || token.back() == '\t' || token.back() == '\r'))
      token.pop_back();
    std::size_t start = 0;
    while (start < token.size() && (token[start] == ' ' || token[start] == '\t')) ++start;
    out.push_back(token.substr(start));
  }
  if (!line.empty() && line.back() == ',') out.push_back("");
  return out;
}

double parse_double(const std::string& token, int line_no, const std::string& column) {
  double value = 0.0;
  const char* begin = token.data();
  const char* end = begin + token.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end)
    throw DataError("line " + std::to_string(line_no) + ", column '" + column +
                    "': cannot parse '" + token + "' as a number");
  return value;
}

int parse_trials(const std::string& token, int line_no) {
  int value = 0;
  const char* begin = token.data();
  const char* end = begin + token.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end || value < 1)
    throw DataError("line " + std::to_string(line_no) +
                    ", column 'trials': expected a positive integer, got '" + token + "'");
  return value;
}

}  // namespace

Dataset load_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path + "'");

  std::string line;
  if (!std::getline(in, line)) throw DataError("'" + path + "' is empty");
  const std::vector<std::string> header = split_csv_line(line);

  // header must be: cluster, y, x1..xp, z1..zq [, trials]
  std::size_t pos = 0;
  auto expect = [&](const std::string& name) {
    if (pos >= header.size() || header[pos] != name)
      throw DataError("'" + path + "': expected header column '" + name + "' at position " +
                      std::to_string(pos + 1));
    ++pos;
  };
  expect("cluster");
  expect("y");
  int p = 0;
  while (pos < header.size() && header[pos] == "x" + std::to_string(p + 1)) { ++p; ++pos; }
  if (p == 0) throw DataError("'" + path + "': no x columns (expected x1, x2, ...)");
  int q = 0;
  while (pos < header.size() && header[pos] == "z" + std::to_string(q + 1)) { ++q; ++pos; }
  if (q == 0) throw DataError("'" + path + "': no z columns (expected z1, z2, ...)");
  bool has_trials = false;
  if (pos < header.size() && header[pos] == "trials") { has_trials = true; ++pos; }
  if (pos != header.size()) {
    throw DataError("'" + path + "': unexpected or duplicate header column '" + header[pos] + "'");
  }
  const std::size_t ncols = header.size();

  Dataset data;
  std::unordered_map<std::string, std::size_t> cluster_index;
  int line_no = 1;
  bool any_row = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const std::vector<std::string> cells = split_csv_line(line);
    if (cells.size() != ncols)
      throw DataError("line " + std::to_string(line_no) + ": expected " + std::to_string(ncols) +
                      " columns, got " + std::to_string(cells.size()));
    any_row = true;

    Observation o;
    o.y = parse_double(cells[1], line_no, "y");
    o.x.resize(p);
    for (int j = 0; j < p; ++j)
      o.x(j) = parse_double(cells[2 + static_cast<std::size_t>(j)], line_no, header[2 + static_cast<std::size_t>(j)]);
    o.z.resize(q);
    for (int j = 0; j < q; ++j)
      o.z(j) = parse_double(cells[2 + static_cast<std::size_t>(p + j)], line_no,
                            header[2 + static_cast<std::size_t>(p + j)]);
    if (has_trials) o.trials = parse_trials(cells[ncols - 1], line_no);

    const std::string& id = cells[0];
    if (id.empty()) throw DataError("line " + std::to_string(line_no) + ": empty cluster id");
    auto it = cluster_index.find(id);
    if (it == cluster_index.end()) {
      it = cluster_index.emplace(id, data.clusters.size()).first;
      data.clusters.push_back(Cluster{id, {}});
    }
    data.clusters[it->second].obs.push_back(std::move(o));
  }
  if (!any_row) throw DataError("'" + path + "' has no data rows");
  data.validate();
  return data;
}

// ---------------------------------------------------------------------------
// report JSON
// ---------------------------------------------------------------------------

using ordered_json = nlohmann::ordered_json;

namespace {

ordered_json gamma_json(const GammaPoint& g) {
  return ordered_json{{"gamma1", g.gamma1}, {"gamma2", g.gamma2}};
}

GammaPoint gamma_from(const ordered_json& j) {
  return {j.at("gamma1").get<double>(), j.at("gamma2").get<double>()};
}

ordered_json stat_json(double value, const GammaPoint& argmax) {
  return ordered_json{{"value", value}, {"argmax", gamma_json(argmax)}};
}

}  // namespace

std::string report_to_json(const TestReport& r) {
  ordered_json j;
  j["family"] = r.family;
  j["trials"] = r.trials;
  j["n"] = r.n;
  j["N"] = r.n_total;
  j["beta_hat"] = r.beta_hat;
  j["phi_hat"] = r.phi_hat;
  j["grid"] = ordered_json{{"n1", r.grid.n1}, {"n2", r.grid.n2}, {"delta0", r.grid.delta0}};
  j["r0"] = r.r0;
  j["seed"] = r.seed;
  j["alpha"] = r.alpha;
  j["statistics"] = ordered_json{{"s_o", stat_json(r.s_o, r.argmax_o)},
                                 {"s_p", stat_json(r.s_p, r.argmax_p)},
                                 {"s_s", stat_json(r.s_s, r.argmax_s)}};
  j["p_values"] = ordered_json{{"p_o", r.p_o}, {"p_p", r.p_p}, {"p_s", r.p_s}};
  j["reject"] = ordered_json{{"s_o", r.reject_o}, {"s_p", r.reject_p}, {"s_s", r.reject_s}};
  j["degenerate_grid_points"] = r.degenerate_grid_points;
  j["ieo_floored"] = r.ieo_floored;
  j["warnings"] = r.warnings;
  return j.dump(2) + "\n";
}

TestReport report_from_json(const std::string& text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw DataError(std::string("invalid report JSON: ") + e.what());
  }
  TestReport r;
  try {
    r.family = j.at("family").get<std::string>();
    r.trials = j.at("trials").get<int>();
    r.n = j.at("n").get<int>();
    r.n_total = j.at("N").get<long long>();
    r.beta_hat = j.at("beta_hat").get<std::vector<double>>();
    r.phi_hat = j.at("phi_hat").get<double>();
    r.grid.n1 = j.at("grid").at("n1").get<int>();
    r.grid.n2 = j.at("grid").at("n2").get<int>();
    r.grid.delta0 = j.at("grid").at("delta0").get<double>();
    r.r0 = j.at("r0").get<int>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.alpha = j.at("alpha").get<double>();
    r.s_o = j.at("statistics").at("s_o").at("value").get<double>();
    r.s_p = j.at("statistics").at("s_p").at("value").get<double>();
    r.s_s = j.at("statistics").at("s_s").at("value").get<double>();
    r.argmax_o = gamma_from(j.at("statistics").at("s_o").at("argmax"));
    r.argmax_p = gamma_from(j.at("statistics").at("s_p").at("argmax"));
    r.argmax_s = gamma_from(j.at("statistics").at("s_s").at("argmax"));
    r.p_o = j.at("p_values").at("p_o").get<double>();
    r.p_p = j.at("p_values").at("p_p").get<double>();
    r.p_s = j.at("p_values").at("p_s").get<double>();
    r.reject_o = j.at("reject").at("s_o").get<bool>();
    r.reject_p = j.at("reject").at("s_p").get<bool>();
    r.reject_s = j.at("reject").at("s_s").get<bool>();
    r.degenerate_grid_points = j.at("degenerate_grid_points").get<int>();
    r.ieo_floored = j.at("ieo_floored").get<int>();
    r.warnings = j.at("warnings").get<std::vector<std::string>>();
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("report JSON is missing fields: ") + e.what());
  }
  return r;
}

std::string rate_table_to_csv(const RateTable& table) {
  std::ostringstream out;
  out << "model,statistic,param,value,mode,rate,se,reps\n";
  out.precision(10);
  for (const auto& row : table.rows) {
    out << row.model << ',' << row.statistic << ',' << row.param << ',' << row.value << ','
        << row.mode << ',' << row.rate << ',' << row.se << ',' << row.reps << '\n';
  }
  return out.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write '" + tmp.string() + "'");
    out << content;
    if (!out) throw DataError("write failed for '" + tmp.string() + "'");
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) throw DataError("cannot rename '" + tmp.string() + "' to '" + path + "': " + ec.message());
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace homscore
