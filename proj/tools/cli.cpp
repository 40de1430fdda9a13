#include "cli.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "gzi/empirical.hpp"
#include "gzi/engine.hpp"
#include "gzi/error.hpp"
#include "gzi/estimator.hpp"
#include "gzi/format.hpp"
#include "gzi/l1.hpp"
#include "gzi/model_spec.hpp"
#include "gzi/oracle.hpp"
#include "gzi/parallel.hpp"

namespace gzi::cli {

namespace {

struct NoUsableSamples : Error {
  using Error::Error;
};

std::uint64_t as_count(double v, const std::string& name) {
  if (!(v >= 0.0) || v != std::floor(v) || v > 1.8e19) throw ConfigError(name + " must be a non-negative integer");
  return static_cast<std::uint64_t>(v);
}

std::string comment_block(const std::string& text) {
  std::istringstream in(text);
  std::string line, out;
  while (std::getline(in, line)) out += "# " + line + "\n";
  return out;
}

class Input {
 public:
  explicit Input(const std::string& path) {
    if (path == "-") {
      stream_ = &std::cin;
      return;
    }
    file_ = std::make_unique<std::ifstream>(path, std::ios::binary);
    if (!*file_) throw ConfigError("cannot open input '" + path + "'");
    stream_ = file_.get();
  }
  std::istream& get() { return *stream_; }

 private:
  std::unique_ptr<std::ifstream> file_;
  std::istream* stream_ = nullptr;
};

void emit(const std::string& path, const std::string& content, std::ostream& out) {
  if (path == "-") {
    out << content;
    return;
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error("cannot write '" + path + "'");
  f << content;
  if (!f) throw Error("write failed for '" + path + "'");
}

Theta parse_theta(const std::string& text) {
  const auto v = parse_number_list(text);
  if (v.size() != 6) throw ConfigError("theta needs 6 values: kappa,gamma,lambda,beta,eta,rho");
  Theta t{v[0], v[1], v[2], v[3], v[4], v[5]};
  try {
    validate(t);
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
  return t;
}

Theta preset_theta(const std::string& name) {
  if (name == "xom") return {0.79, 0.58, 0.17, 0.024, 0.44, 1.13};
  if (name == "msft") return {20.50, 2.15, 2.98, 0.15, 1.21, 7.99};
  throw ConfigError("unknown preset '" + name + "' (xom, msft)");
}

struct Options {
  // shared
  std::string input = "-";
  std::string output = "-";
  double seed = 1;
  double threads = 0;

  // simulate
  std::string model;
  double events = 0;
  double maxTime = 0;
  double burnIn = 10000;
  std::string books;

  // summarize
  std::string bucket = "whole";
  double daySeconds = 86400;

  // extract
  std::string mode = "ask";

  // empirical / plot-data
  double binWidth = 0;
  double timeBins = 20;
  bool exactErrors = false;
  std::string theta;

  // estimate
  double cap = 500000;
  double upper = 1e4;
  double starts = 16;
  double tol = 1e-8;
  bool dropKappaRho = false;
  std::string format = "text";
  std::string title;

  // validate
  std::string suite = "all";
  double reps = 100000;
  double points = 20;

  // recover
  std::string preset = "xom";
  std::string recFormat = "csv";
  double n = 100000;
  double recReps = 50;
  std::string recMode = "synthetic";
  double ticks = 200;
  double marketRate = 1.0;
  double varrho = 0.01;
  double mu = 1.0;
};

std::string header(const CLI::App& sub) {
  return "# gzi " + sub.get_name() + "\n" + comment_block(sub.config_to_str(true, false));
}

int cmd_simulate(const Options& o, const std::string& head, std::ostream& out) {
  const ModelSpec spec = load_model_spec(o.model);
  StopRule stop{as_count(o.events, "events"), o.maxTime};
  if (stop.maxEvents == 0 && !(stop.maxTime > 0.0)) throw ConfigError("simulate needs --events or --time");
  SimOptions so;
  so.burnIn = as_count(o.burnIn, "burn-in");
  const auto seed = as_count(o.seed, "seed");
  const SimTrace trace =
      simulate(spec, stop, seed, o.books.empty() ? RecordMode::L1 : RecordMode::L1WithBooks, so);
  std::ostringstream csv;
  csv << head << comment_block("model:\n" + format_model_spec(spec));
  csv << "# events=" << trace.eventCount << " sim_time=" << format_double(trace.simTime)
      << " absorbed=" << (trace.absorbed ? 1 : 0) << "\n";
  write_l1(csv, trace.records);
  emit(o.output, csv.str(), out);
  if (!o.books.empty()) {
    std::ostringstream side;
    side << head;
    write_book_sidecar(side, trace);
    emit(o.books, side.str(), out);
  }
  return kOk;
}

int cmd_summarize(const Options& o, const std::string& head, std::ostream& out, std::ostream& err) {
  Input in(o.input);
  const L1Parse parsed = parse_l1(in.get());
  if (parsed.rejectedCrossed) err << "warning: " << parsed.rejectedCrossed << " crossed records rejected\n";
  SummaryOptions so;
  if (o.bucket == "month")
    so.bucketing = Bucketing::Month;
  else if (o.bucket != "whole")
    throw ConfigError("bucket must be month or whole");
  so.secondsPerDay = o.daySeconds;
  std::ostringstream text;
  text << head << "# records=" << parsed.records.size() << " rejected=" << parsed.rejectedCrossed
       << " collapsed=" << parsed.collapsedTies << "\n";
  write_summary(text, summarize(parsed.records, so));
  emit(o.output, text.str(), out);
  return kOk;
}

// Jump samples, or an L1 trace (recognised by its header) extracted in ask mode.
std::vector<JumpSample> read_samples(const std::string& path) {
  Input in(path);
  std::stringstream buf;
  buf << in.get().rdbuf();
  std::string line;
  while (std::getline(buf, line) && (line.empty() || line.front() == '#')) {
  }
  if (!line.empty() && line.back() == '\r') line.pop_back();
  buf.clear();
  buf.seekg(0);
  if (line == "time,ask,ask_size,bid,bid_size") return extract_jumps(parse_l1(buf).records);
  return parse_jump_samples(buf);
}

int cmd_extract(const Options& o, const std::string& head, std::ostream& out, std::ostream& err) {
  Input in(o.input);
  const L1Parse parsed = parse_l1(in.get());
  if (parsed.rejectedCrossed) err << "warning: " << parsed.rejectedCrossed << " crossed records rejected\n";
  JumpMode mode = JumpMode::AskOnly;
  if (o.mode == "both")
    mode = JumpMode::BothQuotes;
  else if (o.mode != "ask")
    throw ConfigError("mode must be ask or both");
  const auto samples = extract_jumps(parsed.records, mode);
  std::size_t usable = 0;
  for (const auto& s : samples) usable += s.usable ? 1 : 0;
  std::ostringstream csv;
  csv << head << "# samples=" << samples.size() << " usable=" << usable << "\n";
  write_jump_samples(csv, samples);
  emit(o.output, csv.str(), out);
  return kOk;
}

int cmd_empirical(const Options& o, const std::string& head, std::ostream& out) {
  const auto samples = read_samples(o.input);
  const double width = o.binWidth > 0.0 ? o.binWidth : default_bin_width(samples);
  std::ostringstream csv;
  csv << head << "# bin_width=" << format_double(width) << "\n";
  write_step_csv(csv, {{"omega0", empirical_omega0(samples, width)}, {"omega_plus", empirical_omega_plus(samples, width)}});
  emit(o.output, csv.str(), out);
  return kOk;
}

FitOptions fit_options(const Options& o) {
  FitOptions f;
  f.upper = o.upper;
  f.starts = static_cast<int>(as_count(o.starts, "starts"));
  f.tol = o.tol;
  f.seed = as_count(o.seed, "seed");
  f.dropKappaRho = o.dropKappaRho;
  f.threads = 1;
  return f;
}

int cmd_estimate(const Options& o, const std::string& head, std::ostream& out) {
  const auto samples = read_samples(o.input);
  FitOptions f = fit_options(o);
  f.maxUsable = as_count(o.cap, "cap");
  if (usable_samples(samples, 1).size() == 0) throw NoUsableSamples("no usable samples in '" + o.input + "'");
  const FitReport report = fit(samples, f);
  std::string body;
  if (o.format == "json") {
    auto j = nlohmann::ordered_json::parse(fit_report_json(report));
    j["run"] = head;
    body = j.dump(2) + "\n";
  } else if (o.format == "text") {
    body = head + fit_report_text(report, o.title) + "status=" + to_string(report.status) + "\n";
  } else {
    throw ConfigError("format must be text or json");
  }
  emit(o.output, body, out);
  switch (report.status) {
    case FitStatus::Ok: return kOk;
    case FitStatus::Boundary: return kBoundary;
    case FitStatus::Error: return kFitError;
  }
  return kFitError;
}

int cmd_validate(const Options& o, const std::string& head, std::ostream& out) {
  const auto reps = as_count(o.reps, "reps");
  const auto seed = as_count(o.seed, "seed");
  const auto threads = static_cast<unsigned>(as_count(o.threads, "threads"));
  std::vector<OracleCheck> checks;
  auto add = [&](std::vector<OracleCheck> more) { checks.insert(checks.end(), more.begin(), more.end()); };
  const bool all = o.suite == "all";
  if (all || o.suite == "prop2") add(prop2_suite(reps, seed, threads));
  if (all || o.suite == "components") add(component_suite(reps, seed, threads));
  if (all || o.suite == "derivatives") add(derivative_suite(static_cast<int>(as_count(o.points, "points")), seed));
  if (checks.empty()) throw ConfigError("suite must be prop2, components, derivatives or all");
  std::size_t failed = 0;
  for (const auto& c : checks) failed += c.pass ? 0 : 1;
  emit(o.output, head + format_checks(checks) + "# failed=" + std::to_string(failed) + "\n", out);
  return failed == 0 ? kOk : kFailure;
}

int cmd_recover(const Options& o, const std::string& head, std::ostream& out) {
  const Theta theta0 = o.theta.empty() ? preset_theta(o.preset) : parse_theta(o.theta);
  RecoveryOptions ro;
  ro.fit = fit_options(o);
  ro.threads = static_cast<unsigned>(as_count(o.threads, "threads"));
  if (o.recMode == "engine") {
    ro.mode = RecoveryMode::Engine;
    ro.ticks = static_cast<int>(as_count(o.ticks, "ticks"));
    ro.events = as_count(o.events > 0 ? o.events : 2e7, "events");
    ro.burnIn = as_count(o.burnIn, "burn-in");
    ro.engine.theta = o.marketRate;
    ro.engine.varrho = o.varrho;
    ro.engine.mu = o.mu;
  } else if (o.recMode != "synthetic") {
    throw ConfigError("mode must be synthetic or engine");
  }
  const RecoveryResult r = recovery_study(theta0, as_count(o.n, "n"), static_cast<int>(as_count(o.recReps, "reps")),
                                          as_count(o.seed, "seed"), ro);
  std::string body;
  if (o.recFormat == "json") {
    auto j = nlohmann::ordered_json::parse(recovery_json(r));
    j["run"] = head;
    body = j.dump(2) + "\n";
  } else if (o.recFormat == "csv") {
    std::ostringstream csv;
    csv << head;
    write_recovery_csv(csv, r);
    body = csv.str();
  } else {
    throw ConfigError("format must be csv or json");
  }
  emit(o.output, body, out);
  return kOk;
}

int cmd_plot_data(const Options& o, const std::string& head, std::ostream& out) {
  const auto samples = read_samples(o.input);
  PkOptions po;
  po.timeBins = as_count(o.timeBins, "time-bins");
  po.errorBar = o.exactErrors ? ErrorBar::Exact : ErrorBar::Wald;
  std::optional<Theta> theta;
  if (!o.theta.empty()) theta = parse_theta(o.theta);
  std::ostringstream csv;
  csv << head;
  write_pk_csv(csv, bin_pk(samples, theta, po));
  emit(o.output, csv.str(), out);
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Simulation and estimation for zero-intelligence order book models", "gzi"};
  app.set_config("--config", "", "key = value file; command-line flags take precedence");
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.require_subcommand(1);
  Options o;

  auto io = [&](CLI::App* c, bool input) {
    if (input) c->add_option("-i,--input", o.input, "input file, - for stdin")->capture_default_str();
    c->add_option("-o,--output", o.output, "output file, - for stdout")->capture_default_str();
  };

  auto* sim = app.add_subcommand("simulate", "simulate an order book and write an L1 trace");
  sim->add_option("--model", o.model, "model file")->required()->check(CLI::ExistingFile);
  sim->add_option("--events", o.events, "events after burn-in")->capture_default_str();
  sim->add_option("--time", o.maxTime, "simulated seconds after burn-in")->capture_default_str();
  sim->add_option("--seed", o.seed)->capture_default_str();
  sim->add_option("--burn-in", o.burnIn, "events discarded first")->capture_default_str();
  sim->add_option("--books", o.books, "book snapshot sidecar file");
  io(sim, false);

  auto* sum = app.add_subcommand("summarize", "spread and quote-jump statistics of an L1 trace");
  sum->add_option("--bucket", o.bucket, "month or whole")->capture_default_str();
  sum->add_option("--day-seconds", o.daySeconds, "seconds per trading day")->capture_default_str();
  io(sum, true);

  auto* ext = app.add_subcommand("extract", "quote-jump samples from an L1 trace");
  ext->add_option("--mode", o.mode, "ask (jumps of the ask) or both (jumps of ask or bid)")->capture_default_str();
  io(ext, true);

  auto* emp = app.add_subcommand("empirical", "step-function jump frequencies for m = 0 and m > 0");
  emp->add_option("--bin-width", o.binWidth, "seconds, 0 = automatic")->capture_default_str();
  io(emp, true);

  auto* est = app.add_subcommand("estimate", "least-squares fit with standard errors");
  est->add_option("--cap", o.cap, "maximum usable samples")->capture_default_str();
  est->add_option("--upper", o.upper, "upper bound of every coordinate")->capture_default_str();
  est->add_option("--starts", o.starts)->capture_default_str();
  est->add_option("--tol", o.tol)->capture_default_str();
  est->add_option("--seed", o.seed, "seed of the random starts")->capture_default_str();
  est->add_flag("--drop-kappa-rho", o.dropKappaRho, "omit d kappa / d rho in the delta method");
  est->add_option("--format", o.format, "text or json")->capture_default_str();
  est->add_option("--title", o.title);
  io(est, true);

  auto* val = app.add_subcommand("validate", "Monte-Carlo and finite-difference checks of the closed forms");
  val->add_option("--suite", o.suite, "prop2, components, derivatives or all")->capture_default_str();
  val->add_option("--reps", o.reps)->capture_default_str();
  val->add_option("--points", o.points, "random points of the derivative suite")->capture_default_str();
  val->add_option("--seed", o.seed)->capture_default_str();
  val->add_option("--threads", o.threads, "0 = GZI_THREADS or all cores")->capture_default_str();
  io(val, false);

  auto* rec = app.add_subcommand("recover", "parameter recovery and coverage study");
  rec->add_option("--preset", o.preset, "xom or msft")->capture_default_str();
  rec->add_option("--theta", o.theta, "kappa,gamma,lambda,beta,eta,rho (overrides --preset)");
  rec->add_option("--n", o.n, "usable samples per replication")->capture_default_str();
  rec->add_option("--reps", o.recReps)->capture_default_str();
  rec->add_option("--seed", o.seed)->capture_default_str();
  rec->add_option("--mode", o.recMode, "synthetic or engine")->capture_default_str();
  rec->add_option("--events", o.events, "engine events per replication, 0 = 2e7")->capture_default_str();
  rec->add_option("--burn-in", o.burnIn)->capture_default_str();
  rec->add_option("--ticks", o.ticks)->capture_default_str();
  rec->add_option("--market-rate", o.marketRate)->capture_default_str();
  rec->add_option("--varrho", o.varrho, "long-term cancellation rate")->capture_default_str();
  rec->add_option("--mu", o.mu, "shares per order")->capture_default_str();
  rec->add_option("--starts", o.starts)->capture_default_str();
  rec->add_option("--format", o.recFormat, "csv or json")->capture_default_str();
  rec->add_option("--threads", o.threads, "0 = GZI_THREADS or all cores")->capture_default_str();
  io(rec, false);

  auto* plot = app.add_subcommand("plot-data", "binned p_k frequencies with predictions");
  plot->add_option("--theta", o.theta, "kappa,gamma,lambda,beta,eta,rho for the predicted column");
  plot->add_option("--time-bins", o.timeBins)->capture_default_str();
  plot->add_flag("--exact", o.exactErrors, "Clopper-Pearson instead of Wald error bars");
  io(plot, true);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "gzi: " << e.what() << "\n";
    return kConfig;
  }

  try {
    for (auto* sub : app.get_subcommands()) {
      const std::string head = header(*sub);
      const std::string name = sub->get_name();
      if (name == "simulate") return cmd_simulate(o, head, out);
      if (name == "summarize") return cmd_summarize(o, head, out, err);
      if (name == "extract") return cmd_extract(o, head, out, err);
      if (name == "empirical") return cmd_empirical(o, head, out);
      if (name == "estimate") return cmd_estimate(o, head, out);
      if (name == "validate") return cmd_validate(o, head, out);
      if (name == "recover") return cmd_recover(o, head, out);
      if (name == "plot-data") return cmd_plot_data(o, head, out);
    }
  } catch (const NoUsableSamples& e) {
    err << "gzi: " << e.what() << "\n";
    return kConfig;
  } catch (const ParseError& e) {
    err << "gzi: " << e.what() << "\n";
    return kConfig;
  } catch (const ConfigError& e) {
    err << "gzi: " << e.what() << "\n";
    return kConfig;
  } catch (const std::exception& e) {
    err << "gzi: " << e.what() << "\n";
    return kFailure;
  }
  return kFailure;
}

}  // namespace gzi::cli
