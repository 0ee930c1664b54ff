#include "cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <fstream>
#include <optional>
#include <sstream>

#include "npq/asymptotics.hpp"
#include "npq/io.hpp"
#include "npq/model.hpp"
#include "npq/validation.hpp"

namespace npq::cli {

namespace {

struct Settings {
  double r = 0.9;
  double nu = 0.5;
  std::vector<double> r_list;
  std::vector<double> nu_list;
  int n_max = 200;
  int m_max = 50;
  int n_min = 1;
  std::string method = "qr";
  std::vector<std::string> methods;
  std::vector<std::string> tests;
  std::optional<double> p_lim;
  int n_lim = kDefaultNlim;
  std::string format = "csv";
  bool logmap = false;
  std::uint64_t seed = 1;
  std::int64_t events = 1'000'000;
  int servers = 1;
  unsigned threads = 0;
  double threshold = kDefaultThreshold;
  std::string out_path;
};

Json header(const std::string& command, const ModelParams& p, const std::string& method) {
  Json j;
  j["command"] = command;
  j["version"] = kVersion;
  j["r"] = p.r;
  j["nu"] = p.nu;
  j["method"] = method;
  return j;
}

Method engine(const std::string& name, bool allow_cheb) {
  const Method m = parse_method(name);
  if (m == Method::qr || m == Method::ri || (allow_cheb && m == Method::cheb)) return m;
  throw DomainError("method '" + name + "' is not available for this command");
}

void cmd_marginal(const Settings& s, std::ostream& out) {
  const auto p = ModelParams::make(s.r, s.nu);
  if (s.n_max < 0) throw DomainError("--nmax must be >= 0");
  const auto f = lo_marginal_by_method(p, engine(s.method, false), s.n_max);
  if (s.format == "json") {
    Json j = header("marginal", p, s.method);
    j["n_max"] = s.n_max;
    Json fl = Json::array(), nl = Json::array();
    for (double v : f.values) fl.push_back(v), nl.push_back(json_number(neglog10(v)));
    j["f_lo"] = std::move(fl);
    j["neglog10"] = std::move(nl);
    out << j.dump() << '\n';
    return;
  }
  out << "n,f_lo,neglog10\n";
  for (std::size_t n = 0; n < f.size(); ++n) {
    out << n << ',' << format_double(f[n]) << ',' << format_double(neglog10(f[n])) << '\n';
  }
}

void cmd_joint(const Settings& s, std::ostream& out) {
  const auto p = ModelParams::make(s.r, s.nu);
  if (s.n_max < 0 || s.m_max < 0) throw DomainError("--nmax and --mmax must be >= 0");
  auto joint = joint_by_method(p, engine(s.method, true), s.n_max, s.m_max);
  if (s.logmap) joint = logmap(joint);
  if (s.format == "json") {
    Json j = header("joint", p, s.method);
    j["n_max"] = s.n_max;
    j["m_max"] = s.m_max;
    j["logmap"] = s.logmap;
    Json rows = Json::array();
    for (int n = 0; n <= joint.n_max(); ++n) {
      Json row = Json::array();
      for (int m = 0; m <= joint.m_max(); ++m) row.push_back(joint(n, m));
      rows.push_back(std::move(row));
    }
    j["f"] = std::move(rows);
    out << j.dump() << '\n';
    return;
  }
  out << 'n';
  for (int m = 0; m <= joint.m_max(); ++m) out << ",m" << m;
  out << '\n';
  for (int n = 0; n <= joint.n_max(); ++n) {
    out << n;
    for (int m = 0; m <= joint.m_max(); ++m) out << ',' << format_double(joint(n, m));
    out << '\n';
  }
}

int cmd_validate(const Settings& s, std::ostream& out) {
  std::vector<double> rs = s.r_list, nus = s.nu_list;
  if (rs.empty() || nus.empty()) {
    for (const auto& [r, nu] : standard_grid()) {
      if (s.r_list.empty() && std::find(rs.begin(), rs.end(), r) == rs.end()) rs.push_back(r);
      if (s.nu_list.empty() && std::find(nus.begin(), nus.end(), nu) == nus.end()) nus.push_back(nu);
    }
  }
  std::vector<std::pair<double, double>> grid;
  for (double r : rs) {
    for (double nu : nus) grid.emplace_back(r, nu);
  }
  std::vector<Method> methods;
  for (const auto& m : s.methods) methods.push_back(engine(m, true));

  SweepOptions o;
  o.test.n_lim = s.n_lim;
  o.test.p_lim = s.p_lim;
  o.test.threshold = s.threshold;
  o.mc.seed = s.seed;
  o.mc.n_events = s.events;
  o.mc.n_servers = s.servers;
  o.threads = s.threads;
  const auto recs = validation_sweep(grid, methods, s.tests, o);

  if (s.format == "json") {
    for (const auto& r : recs) out << to_json(r).dump() << '\n';
  } else {
    out << report_csv_header() << '\n';
    for (const auto& r : recs) out << report_csv_row(r) << '\n';
  }
  const bool ok = std::all_of(recs.begin(), recs.end(), [](const MopReport& r) { return r.passed; });
  return ok ? kExitOk : kExitValidationFailure;
}

void cmd_asymptote(const Settings& s, std::ostream& out) {
  const auto p = ModelParams::make(s.r, s.nu);
  const auto rep = asymptote_convergence_report(p, s.n_min, s.n_max, engine(s.method, false));
  const std::string regime(to_string(rep.regime));
  if (s.format == "json") {
    Json j = header("asymptote", p, s.method);
    j["regime"] = regime;
    j["decreasing"] = rep.decreasing;
    j["first_increase"] = rep.first_increase;
    Json pts = Json::array();
    for (const auto& q : rep.points) {
      Json e;
      e["n"] = q.n;
      e["f_lo"] = json_number(q.f_lo);
      e["asym"] = json_number(q.asymptote);
      e["rel_error"] = json_number(q.rel_error);
      pts.push_back(std::move(e));
    }
    j["points"] = std::move(pts);
    out << j.dump() << '\n';
    return;
  }
  out << "n,f_lo,asym,rel_error,regime\n";
  for (const auto& q : rep.points) {
    out << q.n << ',' << format_double(q.f_lo) << ',' << format_double(q.asymptote) << ','
        << format_double(q.rel_error) << ',' << regime << '\n';
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Settings s;
  CLI::App app{"Queue-length distributions of the two-class non-preemptive M/M/c priority queue"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  const std::vector<std::string> formats{"csv", "json"};

  auto common = [&](CLI::App* c) {
    c->add_option("--format", s.format, "Output format")->check(CLI::IsMember(formats));
    c->add_option("--out", s.out_path, "Write to PATH instead of stdout");
  };
  auto params = [&](CLI::App* c) {
    c->add_option("--r", s.r, "Total traffic intensity")->required();
    c->add_option("--nu", s.nu, "High-priority arrival fraction")->required();
  };

  auto* marginal = app.add_subcommand("marginal", "Low-priority marginal f_lo(0..nmax)");
  params(marginal);
  marginal->add_option("--nmax", s.n_max, "Largest queue length");
  marginal->add_option("--method", s.method, "qr or ri");
  common(marginal);

  auto* joint = app.add_subcommand("joint", "Joint PMF f(n, m) as a dense matrix");
  params(joint);
  joint->add_option("--nmax", s.n_max, "Largest low-priority queue length");
  joint->add_option("--mmax", s.m_max, "Largest high-priority queue length");
  joint->add_option("--method", s.method, "qr, ri or cheb");
  joint->add_flag("--logmap", s.logmap, "Apply max{0, 1 + log10(f/f_max)/20}");
  common(joint);

  auto* validate_cmd = app.add_subcommand("validate", "Run the validation battery");
  validate_cmd->add_option("--r", s.r_list, "Traffic intensities (default: standard grid)")->delimiter(',');
  validate_cmd->add_option("--nu", s.nu_list, "High-priority fractions (default: standard grid)")->delimiter(',');
  s.methods = {"qr", "ri"};
  validate_cmd->add_option("--method", s.methods, "Engines for agg, xhi, xlo and nn")->delimiter(',');
  s.tests = {"agg", "xhi", "xlo", "nn"};
  validate_cmd->add_option("--tests", s.tests, "Subset of agg, xhi, xlo, nn, qr, oracle, mc")->delimiter(',');
  validate_cmd->add_option("--nlim", s.n_lim, "Largest index examined");
  validate_cmd->add_option("--plim", s.p_lim, "Probability floor (default 1e-20, xhi 1e-30)");
  validate_cmd->add_option("--threshold", s.threshold, "Smallest passing Xi");
  validate_cmd->add_option("--seed", s.seed, "Simulation seed");
  validate_cmd->add_option("--events", s.events, "Simulation events");
  validate_cmd->add_option("--servers", s.servers, "Simulated servers");
  validate_cmd->add_option("--threads", s.threads, "Worker threads (0: all cores)");
  common(validate_cmd);

  auto* asym = app.add_subcommand("asymptote", "Marginal against its large-n asymptote");
  params(asym);
  s.n_max = 200;
  asym->add_option("--nmin", s.n_min, "First queue length");
  asym->add_option("--nmax", s.n_max, "Last queue length");
  asym->add_option("--method", s.method, "qr or ri");
  common(asym);

  std::vector<std::string> rev(args.rbegin(), args.rend() - (args.empty() ? 0 : 1));
  try {
    app.parse(std::move(rev));
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << kVersion << '\n';
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  std::ofstream file;
  std::ostream* sink = &out;
  if (!s.out_path.empty()) {
    file.open(s.out_path);
    if (!file) {
      err << "error: cannot open " << s.out_path << " for writing\n";
      return kExitUsage;
    }
    sink = &file;
  }

  try {
    std::ostringstream buf;
    int code = kExitOk;
    if (marginal->parsed()) cmd_marginal(s, buf);
    if (joint->parsed()) cmd_joint(s, buf);
    if (validate_cmd->parsed()) code = cmd_validate(s, buf);
    if (asym->parsed()) cmd_asymptote(s, buf);
    *sink << buf.str();
    sink->flush();
    return code;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
}

}  // namespace npq::cli
