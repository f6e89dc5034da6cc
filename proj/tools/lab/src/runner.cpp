#include "lab/runner.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>
#include <system_error>

#include "lab/suite.hpp"
#include "szego/cocycle.hpp"
#include "szego/dos.hpp"
#include "szego/errors.hpp"
#include "szego/gordon.hpp"
#include "szego/kam.hpp"
#include "szego/measures.hpp"

namespace szego::lab {

namespace fs = std::filesystem;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// Comma separated rows under a header naming columns and units.
class Csv {
 public:
  explicit Csv(std::string header) { text_ = std::move(header) + "\n"; }
  template <class... T>
  void add(const T&... cells) {
    std::string line;
    ((line += (line.empty() ? "" : ",") + cell(cells)), ...);
    text_ += line + "\n";
  }
  [[nodiscard]] OutputFile file(std::string name) const { return {std::move(name), text_}; }

 private:
  static std::string cell(double v) { return num(v); }
  static std::string cell(int v) { return std::to_string(v); }
  static std::string cell(long v) { return std::to_string(v); }
  static std::string cell(long long v) { return std::to_string(v); }
  static std::string cell(std::size_t v) { return std::to_string(v); }
  static std::string cell(bool v) { return v ? "1" : "0"; }
  static std::string cell(const std::string& v) {
    if (v.find_first_of(",\"\n") == std::string::npos) return v;
    std::string q = "\"";
    for (const char c : v) q += c == '"' ? std::string("\"\"") : std::string(1, c);
    return q + "\"";
  }
  static std::string cell(const char* v) { return cell(std::string(v)); }
  std::string text_;
};

Json cjson(cplx c) { return Json::array({c.real(), c.imag()}); }

Json matJson(const Mat2& m) {
  return Json::array({cjson(m.a), cjson(m.b), cjson(m.c), cjson(m.d)});
}

Json arcsJson(const SpectrumArcs& s) {
  Json arcs = Json::array();
  for (const auto& a : s.arcs) arcs.push_back(Json{{"lo", a.lo}, {"hi", a.hi}});
  return Json{{"arcs", arcs}, {"gridResolution", s.gridResolution}, {"totalLength", s.totalLength()}};
}

std::vector<double> circleGrid(int n, bool midpoints) {
  std::vector<double> z(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) z[static_cast<std::size_t>(i)] = kTwoPi * (i + (midpoints ? 0.5 : 0.0)) / n;
  return z;
}

PhaseGrid phasesFor(const VerblunskyModel& model, long long count) {
  return count == 0 ? PhaseGrid::defaultFor(model) : PhaseGrid::lowDiscrepancy(model.dim(), static_cast<int>(count));
}

DosTable dosFor(const VerblunskyModel& model, const Json& p, Exec exec) {
  DosOptions o;
  o.exec = exec;
  if (p.contains("gridCells")) o.gridCells = p["gridCells"].get<int>();
  return dos_histogram(model, p["degree"].get<int>(), p["phases"].get<int>(),
                       dosEstimatorFromString(p["estimator"].get<std::string>()), o);
}

Json dosJson(const DosTable& d) {
  return Json{{"grid", d.grid},
              {"cdf", d.cdf},
              {"rhoInf", d.rhoInf},
              {"provenance",
               {{"estimator", toString(d.provenance.estimator)},
                {"degree", d.provenance.degree},
                {"phaseSamples", d.provenance.phaseSamples}}}};
}

CommandOutput runSpectrum(const VerblunskyModel& model, const Json& p, Exec exec) {
  ScanOptions o;
  o.exec = exec;
  o.refineSteps = p["refineSteps"].get<int>();
  o.policy.maxHorizon = p["maxHorizon"].get<long>();
  const SpectrumArcs s = spectrum_scan(model, p["gridSize"].get<int>(), o);
  Csv csv("lo_rad,hi_rad,length_rad");
  for (const auto& a : s.arcs) csv.add(a.lo, a.hi, a.length());
  return {arcsJson(s), {csv.file("arcs.csv")}};
}

CommandOutput runLyapunov(const VerblunskyModel& model, const Json& p, Exec exec) {
  const double radius = p["radius"].get<double>();
  const PhaseGrid phases = phasesFor(model, p["phases"].get<long long>());
  const long nIter = p["nIter"].get<long>();
  Csv csv("zeta_rad,radius,gamma_renormalized,gamma_szego,std_error");
  Json rows = Json::array();
  for (const double zeta : circleGrid(p["gridSize"].get<int>(), false)) {
    const auto r = lyapunov_exponent(model, std::polar(radius, zeta), nIter, phases, exec);
    csv.add(zeta, radius, r.gammaRenormalized, r.gammaSzego, r.stdError);
    rows.push_back(Json{{"zeta", zeta},
                        {"gammaRenormalized", r.gammaRenormalized},
                        {"gammaSzego", r.gammaSzego},
                        {"stdError", r.stdError}});
  }
  return {Json{{"radius", radius}, {"phaseSamples", phases.size()}, {"rows", rows}}, {csv.file("lyapunov.csv")}};
}

CommandOutput runRotation(const VerblunskyModel& model, const Json& p, Exec exec) {
  const PhaseGrid phases = phasesFor(model, p["phases"].get<long long>());
  const long nIter = p["nIter"].get<long>();
  Csv csv("zeta_rad,rho_turns");
  Json rows = Json::array();
  for (const double zeta : circleGrid(p["gridSize"].get<int>(), false)) {
    const double rho = rotation_number(model, zeta, nIter, phases, exec).rho;
    csv.add(zeta, rho);
    rows.push_back(Json{{"zeta", zeta}, {"rho", rho}});
  }
  return {Json{{"rows", rows}}, {csv.file("rotation.csv")}};
}

CommandOutput runDos(const VerblunskyModel& model, const Json& p, Exec exec) {
  const DosTable d = dosFor(model, p, exec);
  Csv csv("zeta_rad,cdf");
  for (std::size_t i = 0; i < d.grid.size(); ++i) csv.add(d.grid[i], d.cdf[i]);
  return {dosJson(d), {csv.file("dos.csv")}};
}

CommandOutput runThouless(const VerblunskyModel& model, const Json& p, Exec exec) {
  const DosTable d = dosFor(model, p, exec);
  const double radius = p["radius"].get<double>();
  const PhaseGrid phases = PhaseGrid::defaultFor(model);
  Csv csv("zeta_rad,radius,gamma_szego,thouless_integral,gap");
  Json rows = Json::array();
  double worst = 0.0;
  for (const double zeta : circleGrid(p["zetaCount"].get<int>(), true)) {
    const cplx z = std::polar(radius, zeta);
    const auto lyap = lyapunov_exponent(model, z, p["nIter"].get<long>(), phases, exec);
    const auto t = thouless_check(model, z, d, lyap);
    worst = std::max(worst, t.gap);
    csv.add(zeta, radius, t.lhs, t.rhs, t.gap);
    rows.push_back(Json{{"zeta", zeta}, {"lhs", t.lhs}, {"rhs", t.rhs}, {"gap", t.gap}});
  }
  return {Json{{"radius", radius}, {"maxGap", worst}, {"rows", rows}}, {csv.file("thouless.csv")}};
}

CommandOutput runHolder(const VerblunskyModel& model, const Json& p, Exec exec) {
  const DosTable d = dosFor(model, p, exec);
  auto zetas = p["zetas"].get<std::vector<double>>();
  if (zetas.empty()) zetas = circleGrid(p["zetaCount"].get<int>(), true);
  const HolderTable t = holder_modulus(d, zetas, p["epsilons"].get<std::vector<double>>());
  Csv rows("zeta_rad,epsilon_rad,mass,below_resolution");
  Json jr = Json::array();
  for (const auto& r : t.rows) {
    rows.add(r.zeta, r.epsilon, r.mass, r.belowResolution);
    jr.push_back(Json{{"zeta", r.zeta}, {"epsilon", r.epsilon}, {"mass", r.mass}, {"belowResolution", r.belowResolution}});
  }
  Csv fits("zeta_rad,slope,applicable");
  Json jf = Json::array();
  for (const auto& f : t.fits) {
    fits.add(f.zeta, f.slope.value_or(NAN), f.slope.has_value());
    jf.push_back(Json{{"zeta", f.zeta},
                      {"slope", f.slope ? Json(*f.slope) : Json(nullptr)},
                      {"localSlopes", f.localSlopes}});
  }
  return {Json{{"rows", jr}, {"fits", jf}}, {rows.file("holder_masses.csv"), fits.file("holder_fits.csv")}};
}

Json checksJson(const std::vector<Check>& checks) {
  Json out = Json::array();
  for (const auto& c : checks)
    out.push_back(Json{{"name", c.name}, {"value", c.value}, {"bound", c.bound}, {"pass", c.pass}});
  return out;
}

Json suFunctionJson(const SuFunction& f) {
  Json modes = Json::array();
  for (const auto& [k, m] : f.modes()) modes.push_back(Json{{"k", k}, {"t", cjson(m.t)}, {"v", cjson(m.v)}});
  return Json{{"radius", f.radius()}, {"modes", modes}};
}

Json conjugationJson(const Conjugation& b) {
  Json factors = Json::array();
  for (const auto& f : b.factors()) {
    switch (f.kind) {
      case Conjugation::Factor::Kind::constant:
        factors.push_back(Json{{"kind", "constant"}, {"matrix", matJson(f.mat)}});
        break;
      case Conjugation::Factor::Kind::exponential:
        factors.push_back(Json{{"kind", "exponential"}, {"generator", suFunctionJson(f.generator)}});
        break;
      case Conjugation::Factor::Kind::rotation:
        factors.push_back(Json{{"kind", "rotation"}, {"degree", f.degree}});
        break;
    }
  }
  return factors;
}

CommandOutput runKam(const VerblunskyModel& model, const Json& p) {
  const KamSchedule schedule(p["epsilon0"].get<double>(), p["r"].get<double>());
  KamIterateOptions o;
  o.floor = p["floor"].get<double>();
  o.gate.enforce = p["enforceGate"].get<bool>();
  const KamIteration it = kam_iterate(model, p["zeta"].get<double>(), schedule, p["maxSteps"].get<int>(), o);
  Json states = Json::array();
  Csv csv("step,check,value,bound,pass");
  for (const auto& s : it.states) {
    Json js{{"j", s.j},
            {"s", {{"a", cjson(s.s.a)}, {"b", cjson(s.s.b)}}},
            {"f", suFunctionJson(s.f)},
            {"b", conjugationJson(s.b)},
            {"degB", s.degB},
            {"lastBranch", toString(s.lastBranch)},
            {"conjugacyResidual", s.conjugacyResidual},
            {"bNormSup", s.bNormSup},
            {"checks", checksJson(s.checks)}};
    if (s.resonantForm) {
      const auto& r = *s.resonantForm;
      js["resonantForm"] = Json{{"t", r.t}, {"v", cjson(r.v)}, {"rho", cjson(r.rho)}, {"c", cjson(r.c)},
                                {"u", matJson(r.u)}, {"residualBound", r.residualBound}};
    }
    states.push_back(js);
    for (const auto& c : s.checks) csv.add(s.j, c.name, c.value, c.bound, c.pass);
  }
  Json payload{{"states", states},
               {"stopReason", it.stopReason},
               {"floorAt", it.floorAt ? Json(*it.floorAt) : Json(nullptr)},
               {"schedule",
                {{"epsilon0", schedule.epsilon0}, {"r", schedule.r}, {"sigma", schedule.sigma}}}};
  return {payload, {csv.file("kam_checks.csv")}};
}

CommandOutput runJl(const VerblunskyModel& model, const Json& p, Exec exec) {
  const auto x = p["x"].get<std::vector<double>>();
  if (static_cast<int>(x.size()) != model.dim())
    throw DomainError("params.x needs one coordinate per frequency component");
  std::mt19937_64 rng(p["seed"].get<unsigned long long>());
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double lmin = std::log(p["epsMin"].get<double>()), lmax = std::log(p["epsMax"].get<double>());
  JlOptions jo;
  jo.exec = exec;
  WindowOptions wo;
  wo.exec = exec;
  const bool windows = p["windows"].get<bool>();
  const auto count = p["identityCount"].get<std::size_t>();

  Csv bounds("zeta_rad,epsilon,phi_rad,abs_F,norm_ratio,required_A,universal_A,sup_F_phi,sup_transfer_sq,"
             "horizon,required_C,universal_C,identity_abs,identity_rel");
  Csv win("zeta_rad,epsilon,mu_mass,lambda_mass,sup_transfer_sq,required_C_mu,required_C_lambda,universal_C");
  Json rows = Json::array();
  int violations = 0;
  const int samples = p["samples"].get<int>();
  for (int s = 0; s < samples; ++s) {
    const double zeta = kTwoPi * unit(rng);
    const double eps = std::exp(lmin + (lmax - lmin) * unit(rng));
    const double phiArg = kTwoPi * unit(rng);
    const auto r = jl_bound_check(model, x, zeta, eps, std::polar(1.0, phiArg), jo);
    const auto id = jl_identity_defect(model, x, zeta, std::polar(1.0, phiArg), count);
    bounds.add(zeta, eps, phiArg, r.FAbs, r.normRatio, r.requiredA, r.universalA, r.FSupPhi, r.supTransfer,
               r.horizon, r.requiredC, r.universalC, id.absolute, id.relative);
    Json jr{{"zeta", zeta},           {"epsilon", eps},           {"phi", phiArg},
            {"requiredA", r.requiredA}, {"requiredC", r.requiredC}, {"twoSided", r.twoSidedHolds()},
            {"cocycle", r.cocycleHolds()}, {"identityAbsolute", id.absolute}, {"identityRelative", id.relative}};
    violations += !r.twoSidedHolds() + !r.cocycleHolds();
    if (windows) {
      const auto w = measure_window_bound(model, x, zeta, eps, wo);
      win.add(zeta, eps, w.muMass, w.lambdaMass, w.supTransfer, w.requiredCMu, w.requiredCLambda, w.universalC);
      jr["window"] = Json{{"muMass", w.muMass},
                          {"lambdaMass", w.lambdaMass},
                          {"requiredCMu", w.requiredCMu},
                          {"requiredCLambda", w.requiredCLambda},
                          {"holds", w.holds()}};
      violations += !w.holds();
    }
    rows.push_back(jr);
  }
  const MeasureConstants k;
  Json payload{{"constants", {{"A", k.A}, {"C", k.C}, {"CWindow", k.CWindow}}},
               {"violations", violations},
               {"rows", rows}};
  std::vector<OutputFile> files{bounds.file("jl_bounds.csv")};
  if (windows) files.push_back(win.file("jl_windows.csv"));
  return {payload, files};
}

CommandOutput runGordon(const VerblunskyModel& model, const Json& p, Exec exec) {
  if (model.dim() != 1) throw DomainError("gordon needs a one-dimensional frequency");
  const int cfDepth = p["cfDepth"].get<int>();
  auto qs = p["qs"].get<std::vector<long long>>();
  if (qs.empty())
    for (const long long q : cf_denominators(model.omega()[0], cfDepth))
      if (q <= 100000) qs.push_back(q);
  const auto x = p["x"].get<std::vector<double>>();
  if (x.size() != 1) throw DomainError("params.x needs exactly one coordinate");
  GordonOptions o;
  o.cfDepth = cfDepth;
  o.lyapunovIter = p["lyapunovIter"].get<long>();
  o.exec = exec;

  Csv csv("zeta_rad,q,defect_forward,defect_backward,three_block_max,hypotheses_met,holds,beta_hat,gamma_hat");
  Json rows = Json::array();
  int violations = 0;
  for (const double zeta : circleGrid(p["zetaCount"].get<int>(), true))
    for (const long long q : qs) {
      const auto r = gordon_report(model, x, zeta, q, o);
      csv.add(zeta, q, r.defectForward, r.defectBackward, r.threeBlockMax, r.hypothesesMet, r.holds,
              r.betaEstimate, r.gammaEstimate);
      rows.push_back(Json{{"zeta", zeta},
                          {"q", q},
                          {"defectForward", r.defectForward},
                          {"defectBackward", r.defectBackward},
                          {"threeBlockMax", r.threeBlockMax},
                          {"hypothesesMet", r.hypothesesMet},
                          {"holds", r.holds},
                          {"gammaEstimate", r.gammaEstimate}});
      violations += !r.holds;
    }
  Json payload{{"betaEstimate", beta_exponent(model.omega()[0], cfDepth)},
               {"violations", violations},
               {"rows", rows}};
  std::vector<OutputFile> files{csv.file("gordon.csv")};
  if (const int grid = p["scGrid"].get<int>(); grid > 0) {
    ScOptions so;
    so.margin = p["margin"].get<double>();
    so.lyapunovIter = o.lyapunovIter;
    so.exec = exec;
    so.scan.exec = exec;
    const ScRegion region = sc_region(model, grid, cfDepth, so);
    Json arcs = Json::array();
    Csv sc("lo_rad,hi_rad,min_gamma,max_gamma");
    for (const auto& a : region.arcs) {
      arcs.push_back(Json{{"lo", a.arc.lo}, {"hi", a.arc.hi}, {"minGamma", a.minGamma}, {"maxGamma", a.maxGamma}});
      sc.add(a.arc.lo, a.arc.hi, a.minGamma, a.maxGamma);
    }
    payload["scRegion"] = Json{{"arcs", arcs}, {"margin", region.margin}, {"betaEstimate", region.betaEstimate}};
    files.push_back(sc.file("sc_region.csv"));
  }
  return {payload, files};
}

CommandOutput runSuite(const VerblunskyModel& model, const Json& p, Exec exec) {
  SuiteParams sp;
  sp.gridSize = p["gridSize"].get<int>();
  sp.degree = p["degree"].get<int>();
  sp.phases = p["phases"].get<int>();
  const auto rows = model_suite(model, sp, exec);
  Csv csv("check,value,bound,pass,note");
  Json jr = Json::array();
  bool passed = true;
  for (const auto& r : rows) {
    csv.add(r.name, r.value, r.bound, r.pass, r.note);
    jr.push_back(Json{{"name", r.name}, {"value", r.value}, {"bound", r.bound}, {"pass", r.pass}, {"note", r.note}});
    passed = passed && r.pass;
  }
  CommandOutput out{Json{{"passed", passed}, {"rows", jr}}, {csv.file("suite.csv")}};
  out.suitePassed = passed;
  return out;
}

std::string readFile(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void warn(const RunOptions& o, RunReport& r, std::string msg) {
  if (o.log) *o.log << "warning: " << msg << "\n";
  r.warnings.push_back(std::move(msg));
}

}  // namespace

CommandOutput execute(const ExperimentConfig& config, Exec exec) {
  const VerblunskyModel model = config.buildModel();
  const Json& p = config.params;
  switch (config.command) {
    case Command::spectrum: return runSpectrum(model, p, exec);
    case Command::lyapunov: return runLyapunov(model, p, exec);
    case Command::rotation: return runRotation(model, p, exec);
    case Command::dos: return runDos(model, p, exec);
    case Command::thouless: return runThouless(model, p, exec);
    case Command::holder: return runHolder(model, p, exec);
    case Command::kam: return runKam(model, p);
    case Command::jl: return runJl(model, p, exec);
    case Command::gordon: return runGordon(model, p, exec);
    case Command::suite: return runSuite(model, p, exec);
  }
  throw ComputationError("unhandled command");
}

Json ResultEnvelope::toJson() const {
  return Json{{"configHash", configHash}, {"toolVersion", toolVersion}, {"wallTime", wallTime}, {"payload", payload}};
}

fs::path cachePath(const fs::path& outDir, const std::string& hash) {
  return outDir / ".szego-cache" / (hash + ".json");
}

void writeAtomically(const fs::path& path, const std::string& content) {
  fs::create_directories(path.parent_path().empty() ? fs::path(".") : path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw std::runtime_error("short write to " + tmp.string());
  }
  fs::rename(tmp, path);
}

RunReport run(const ExperimentConfig& config, const RunOptions& options) {
  RunReport report;
  const std::string hash = config.hash();
  const std::string canonical = config.canonicalText();
  const fs::path entry = cachePath(options.outDir, hash);
  const auto start = std::chrono::steady_clock::now();

  CommandOutput output;
  bool hit = false;
  if (options.useCache && fs::exists(entry)) {
    try {
      const Json cached = Json::parse(readFile(entry));
      if (cached.at("configHash") != hash || cached.at("canonicalConfig") != canonical)
        throw std::runtime_error("entry does not match the config");
      output.payload = Json::parse(cached.at("payload").get<std::string>());
      for (const auto& [name, content] : cached.at("files").items())
        output.files.push_back({name, content.get<std::string>()});
      output.suitePassed = cached.at("suitePassed").get<bool>();
      hit = true;
    } catch (const std::exception& e) {
      warn(options, report, "cache entry " + entry.string() + " is corrupt (" + e.what() + "); recomputing");
      output = {};
    }
  }
  if (!hit) output = execute(config, Exec{options.threads});

  const std::string payloadText = output.payload.dump(2) + "\n";
  if (options.useCache && !hit) {
    Json files = Json::object();
    for (const auto& f : output.files) files[f.name] = f.content;
    const Json cached{{"configHash", hash},
                      {"canonicalConfig", canonical},
                      {"payload", payloadText},
                      {"files", files},
                      {"suitePassed", output.suitePassed}};
    try {
      writeAtomically(entry, cached.dump());
    } catch (const std::exception& e) {
      warn(options, report, std::string("could not write cache entry: ") + e.what());
    }
  }

  report.cacheHit = hit;
  report.suitePassed = output.suitePassed;
  report.envelope.configHash = hash;
  report.envelope.payload = std::move(output.payload);
  report.envelope.wallTime =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  const auto put = [&](const std::string& name, const std::string& content) {
    const fs::path path = options.outDir / name;
    writeAtomically(path, content);
    report.written.push_back(path);
  };
  put("payload.json", payloadText);
  put("result.json", report.envelope.toJson().dump(2) + "\n");
  for (const auto& f : output.files) put(f.name, f.content);
  return report;
}

}  // namespace szego::lab
