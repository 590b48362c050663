#include "bellkit/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace bellkit {

namespace {

using nlohmann::json;

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

json interval_json(const Interval& w) { return json{{"lo", w.lo}, {"hi", w.hi}}; }

json bound_json(double v) {
  if (std::isinf(v)) return nullptr;
  return v;
}

Cat cat_from_code(const std::string& s) {
  if (s == "o") return Cat::o;
  if (s == "e") return Cat::e;
  if (s == "u") return Cat::u;
  if (s == "g") return Cat::g;
  throw std::invalid_argument("unknown outcome code: " + s);
}

const char* cat_code(Cat c) {
  switch (c) {
    case Cat::o: return "o";
    case Cat::e: return "e";
    case Cat::u: return "u";
    case Cat::g: return "g";
  }
  return "?";
}

}  // namespace

Permutation permutation_from_string(const std::string& s) {
  if (s == "none") return Permutation::none;
  if (s == "labels") return Permutation::labels;
  if (s == "directions") return Permutation::directions;
  if (s == "both") return Permutation::both;
  throw std::invalid_argument("unknown permutation: " + s);
}

std::string to_string(Permutation p) {
  switch (p) {
    case Permutation::none: return "none";
    case Permutation::labels: return "labels";
    case Permutation::directions: return "directions";
    case Permutation::both: return "both";
  }
  return "?";
}

QuantumState make_state(const StateSpec& spec) {
  if (spec.kind == "psi1") return make_bell_state(BellKind::psi1);
  if (spec.kind == "psi2") return make_bell_state(BellKind::psi2);
  if (spec.kind == "giustina") return make_giustina_state(spec.param);
  if (spec.kind == "larsson") return make_larsson_state(spec.param);
  throw std::invalid_argument("unknown state kind: " + spec.kind);
}

PredictionSet scenario_predictions(const Scenario& sc) {
  QuantumState st = make_state(sc.state);
  bool flipDirections =
      sc.permutations == Permutation::directions || sc.permutations == Permutation::both;
  bool flipLabels = sc.permutations == Permutation::labels || sc.permutations == Permutation::both;
  if (flipDirections) st = permute_directions(st);
  Setting a1{sc.a1, Side::A, sc.convention};
  Setting a2{sc.a2, Side::A, sc.convention};
  Setting b1{sc.b1, Side::B, sc.convention};
  Setting b2{sc.b2, Side::B, sc.convention};
  PredictionSet pred = prediction_set(st, a1, a2, b1, b2);
  if (flipLabels) pred = pred.permute_labels();
  return pred;
}

Scenario scenario_from_json(const std::string& text) {
  json j = json::parse(text);
  Scenario sc;
  sc.state.kind = j.at("state").at("kind").get<std::string>();
  if (sc.state.kind != "psi1" && sc.state.kind != "psi2" && sc.state.kind != "giustina" &&
      sc.state.kind != "larsson")
    throw std::invalid_argument("unknown state kind: " + sc.state.kind);
  if (j.at("state").contains("params")) {
    const json& p = j.at("state").at("params");
    if (p.contains("r")) sc.state.param = p.at("r").get<double>();
    if (p.contains("xi")) sc.state.param = p.at("xi").get<double>();
  }
  const json& ang = j.at("angles");
  sc.a1 = ang.at("a1").get<double>();
  sc.a2 = ang.at("a2").get<double>();
  sc.b1 = ang.at("b1").get<double>();
  sc.b2 = ang.at("b2").get<double>();
  if (j.contains("convention")) {
    std::string c = j.at("convention").get<std::string>();
    if (c == "bloch")
      sc.convention = AngleConvention::bloch;
    else if (c == "polarizer")
      sc.convention = AngleConvention::polarizer;
    else
      throw std::invalid_argument("unknown angle convention: " + c);
  }
  if (j.contains("permutations"))
    sc.permutations = permutation_from_string(j.at("permutations").get<std::string>());
  return sc;
}

Scenario giustina_scenario(double r, Permutation perms) {
  constexpr double deg = M_PI / 180.0;
  Scenario sc;
  sc.state = {"giustina", r};
  sc.a1 = 85.6 * deg;
  sc.a2 = 118.0 * deg;
  sc.b1 = -5.4 * deg;
  sc.b2 = 25.9 * deg;
  sc.convention = AngleConvention::polarizer;
  sc.permutations = perms;
  return sc;
}

void write_prediction_csv(std::ostream& os, const PredictionSet& pred) {
  os << "i,j,a,b,probability\n";
  for (int i = 1; i <= 2; ++i)
    for (int j = 1; j <= 2; ++j)
      for (int a : {1, -1})
        for (int b : {1, -1})
          os << i << ',' << j << ',' << a << ',' << b << ',' << fmt17(pred.q_joint(i, j, a, b))
             << '\n';
  for (int i = 1; i <= 2; ++i)
    for (int a : {1, -1}) os << i << ",0," << a << ",0," << fmt17(pred.q_a(i, a)) << '\n';
  for (int j = 1; j <= 2; ++j)
    for (int b : {1, -1}) os << "0," << j << ",0," << b << ',' << fmt17(pred.q_b(j, b)) << '\n';
}

void write_ensemble_csv(std::ostream& os, const Ensemble& m) {
  os << "instrA1,instrA2,instrB1,instrB2,pA,pB,weight\n";
  for (const auto& e : m.entries)
    os << e.state.instr[0] << ',' << e.state.instr[1] << ',' << e.state.instr[2] << ','
       << e.state.instr[3] << ',' << fmt17(e.state.pA) << ',' << fmt17(e.state.pB) << ','
       << fmt17(e.weight) << '\n';
}

Ensemble read_ensemble_csv(std::istream& is) {
  Ensemble m;
  std::string line;
  bool first = true;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (first) {
      first = false;
      if (line.rfind("instrA1", 0) == 0) continue;
    }
    auto cells = split(line, ',');
    if (cells.size() != 7) throw std::invalid_argument("ensemble csv: expected 7 columns");
    Ensemble::Entry e;
    for (int k = 0; k < 4; ++k) e.state.instr[k] = std::stoi(cells[k]);
    e.state.pA = std::stod(cells[4]);
    e.state.pB = std::stod(cells[5]);
    e.weight = std::stod(cells[6]);
    m.entries.push_back(e);
  }
  return m;
}

void write_count_table_csv(std::ostream& os, const CountTable& counts) {
  os << "context,i,j,outcomeA,outcomeB,count\n";
  os << "trials,0,0,-,-," << fmt17(counts.trialsPerContext) << '\n';
  os << "trials_nopol,0,0,-,-," << fmt17(counts.trialsNoPol) << '\n';
  for (int i = 1; i <= 2; ++i)
    for (int j = 1; j <= 2; ++j)
      for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b)
          os << "coinc," << i << ',' << j << ',' << cat_code(Cat(a)) << ',' << cat_code(Cat(b))
             << ',' << fmt17(counts.count(i, j, Cat(a), Cat(b))) << '\n';
  for (int i = 1; i <= 2; ++i) os << "nopol," << i << ",0,o,inf," << fmt17(counts.nA_inf[i - 1]) << '\n';
  for (int j = 1; j <= 2; ++j) os << "nopol,0," << j << ",inf,o," << fmt17(counts.nInf_B[j - 1]) << '\n';
  os << "nopol,0,0,inf,inf," << fmt17(counts.nInfInf) << '\n';
}

CountTable read_count_table_csv(std::istream& is) {
  CountTable c;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#' || line.rfind("context", 0) == 0) continue;
    auto cells = split(line, ',');
    if (cells.size() != 6) throw std::invalid_argument("count csv: expected 6 columns");
    const std::string& ctx = cells[0];
    double value = std::stod(cells[5]);
    if (ctx == "trials") {
      c.trialsPerContext = value;
    } else if (ctx == "trials_nopol") {
      c.trialsNoPol = value;
    } else if (ctx == "coinc") {
      int i = std::stoi(cells[1]), j = std::stoi(cells[2]);
      c.count(i, j, cat_from_code(cells[3]), cat_from_code(cells[4])) = value;
    } else if (ctx == "nopol") {
      int i = std::stoi(cells[1]), j = std::stoi(cells[2]);
      if (i > 0 && j == 0)
        c.nA_inf[i - 1] = value;
      else if (i == 0 && j > 0)
        c.nInf_B[j - 1] = value;
      else if (i == 0 && j == 0)
        c.nInfInf = value;
      else
        throw std::invalid_argument("count csv: nopol rows take one setting index at most");
    } else {
      throw std::invalid_argument("count csv: unknown context " + ctx);
    }
  }
  return c;
}

void write_experiment_csv(std::ostream& os, const ExperimentRecord& rec) {
  os << "kind,i,j,a,b,count\n";
  for (int i = 1; i <= 2; ++i) os << "single," << i << ",0,o,-," << fmt17(rec.singlesA[i - 1]) << '\n';
  for (int j = 1; j <= 2; ++j) os << "single,0," << j << ",-,o," << fmt17(rec.singlesB[j - 1]) << '\n';
  for (int i = 1; i <= 2; ++i)
    for (int j = 1; j <= 2; ++j)
      os << "coinc," << i << ',' << j << ",o,o," << fmt17(rec.coincOO[i - 1][j - 1]) << '\n';
  os << "meta,j_value,0,-,-," << fmt17(rec.jValue) << '\n';
  os << "meta,total_trials,0,-,-," << fmt17(rec.totalTrials) << '\n';
  os << "meta,r,0,-,-," << fmt17(rec.rParam) << '\n';
}

ExperimentRecord read_experiment_csv(std::istream& is) {
  ExperimentRecord rec;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#' || line.rfind("kind", 0) == 0) continue;
    auto cells = split(line, ',');
    if (cells.size() != 6) throw std::invalid_argument("experiment csv: expected 6 columns");
    double value = std::stod(cells[5]);
    if (cells[0] == "single") {
      int i = std::stoi(cells[1]), j = std::stoi(cells[2]);
      if (i > 0)
        rec.singlesA[i - 1] = value;
      else
        rec.singlesB[j - 1] = value;
    } else if (cells[0] == "coinc") {
      rec.coincOO[std::stoi(cells[1]) - 1][std::stoi(cells[2]) - 1] = value;
    } else if (cells[0] == "meta") {
      if (cells[1] == "j_value") rec.jValue = value;
      if (cells[1] == "total_trials") rec.totalTrials = value;
      if (cells[1] == "r") rec.rParam = value;
    } else {
      throw std::invalid_argument("experiment csv: unknown kind " + cells[0]);
    }
  }
  return rec;
}

std::vector<ReferenceColumn> read_reference_models(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open " + path);
  std::string line;
  std::vector<ReferenceColumn> cols;
  std::vector<std::vector<double>> weights;  // [row][col]
  std::vector<std::array<std::string, 6>> patterns;
  bool headerSeen = false;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    auto cells = split(line, ',');
    if (!headerSeen) {
      headerSeen = true;
      for (std::size_t k = 6; k < cells.size(); ++k) {
        // header entries look like w_theta0.4_eta0.9
        double theta = 0.0, eta = 0.0;
        if (std::sscanf(cells[k].c_str(), "w_theta%lf_eta%lf", &theta, &eta) != 2)
          throw std::runtime_error("reference models: bad column header " + cells[k]);
        cols.push_back({theta, eta, {}});
      }
      continue;
    }
    if (cells.size() != 6 + cols.size()) throw std::runtime_error("reference models: bad row");
    patterns.push_back({cells[0], cells[1], cells[2], cells[3], cells[4], cells[5]});
    std::vector<double> w;
    for (std::size_t k = 6; k < cells.size(); ++k) w.push_back(std::stod(cells[k]));
    weights.push_back(std::move(w));
  }
  for (std::size_t c = 0; c < cols.size(); ++c) {
    Ensemble m;
    for (std::size_t r = 0; r < patterns.size(); ++r) {
      const auto& pat = patterns[r];
      auto instrOf = [&](int k, int sign) {
        if (pat[k] == "0") return 0;
        if (pat[k] == "+") return sign;
        if (pat[k] == "-") return -sign;
        throw std::runtime_error("reference models: bad instruction " + pat[k]);
      };
      bool allZero = pat[0] == "0" && pat[1] == "0" && pat[2] == "0" && pat[3] == "0";
      for (int sign : {1, -1}) {
        if (allZero && sign < 0) break;
        LhvState s;
        for (int k = 0; k < 4; ++k) s.instr[k] = instrOf(k, sign);
        s.pA = std::stod(pat[4]);
        s.pB = std::stod(pat[5]);
        m.entries.push_back({s, weights[r][c]});
      }
    }
    // Listed weights carry print rounding; rescale to a unit total.
    double total = m.total_weight();
    if (total <= 0.0) throw std::runtime_error("reference models: empty column");
    for (auto& e : m.entries) e.weight /= total;
    cols[c].model = m.canonicalized();
  }
  return cols;
}

std::string beta_report_json(const BetaReport& report) {
  json j{{"value", report.value},
         {"kind", to_string(report.kind)},
         {"convention", to_string(report.convention)},
         {"bounds", {{"lower", bound_json(report.lower)}, {"upper", bound_json(report.upper)}}},
         {"violated", report.violated},
         {"assumptions", report.assumptions}};
  return j.dump(2);
}

std::string gamma_report_json(const GammaReport& report,
                              const std::vector<std::pair<std::string, std::string>>& flags) {
  json j{{"gamma_A", report.gammaA},
         {"gamma_B", report.gammaB},
         {"gamma_report", report.gammaReport},
         {"gamma_report_bound", report.gammaReportBound},
         {"eta_window", {report.etaWindow.first, report.etaWindow.second}},
         {"j_value", report.jValue},
         {"window_A", interval_json(report.windowA)},
         {"window_B", interval_json(report.windowB)}};
  for (int i = 1; i <= 2; ++i)
    for (int k = 1; k <= 2; ++k) {
      std::string key = std::to_string(i) + std::to_string(k);
      j["gamma_" + key] = report.gammaIJ[i - 1][k - 1];
      j["window_" + key] = interval_json(report.windowIJ[i - 1][k - 1]);
    }
  json f = json::array();
  for (const auto& [a, b] : flags) f.push_back(json::array({a, b}));
  j["flags"] = f;
  return j.dump(2);
}

std::string read_text_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

}  // namespace bellkit
