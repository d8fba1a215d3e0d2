#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "aralab/catalog.hpp"
#include "aralab/error.hpp"
#include "aralab/orchestrator.hpp"
#include "aralab/scenario.hpp"
#include "aralab/topology.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace aralab;

namespace {

struct Calendar {
  std::string path;
  std::string catalog_path;
  std::string topology_path;
  std::optional<double> radius;
};

std::string read_or_empty(const std::string& path) {
  if (!fs::exists(path)) return {};
  return read_text_file(path);
}

// Replays the stored journal, applies `op` and appends only the new entries.
template <typename Op>
int with_calendar(const Calendar& cal, Op op) {
  const PlatformCatalog catalog =
      load_platform_catalog(cal.catalog_path.empty() ? default_catalog_path() : cal.catalog_path);
  const Topology topo =
      load_topology(cal.topology_path.empty() ? default_topology_path() : cal.topology_path, catalog);
  orch::CalendarParams params;
  params.interference_radius_m = cal.radius;
  orch::Orchestrator o = orch::Orchestrator::replay(read_or_empty(cal.path), topo, catalog, params);
  const std::size_t before = o.journal().size();
  const int rc = op(o);
  std::vector<json> fresh(o.journal().begin() + static_cast<std::ptrdiff_t>(before), o.journal().end());
  if (!fresh.empty()) {
    if (fs::path(cal.path).has_parent_path()) fs::create_directories(fs::path(cal.path).parent_path());
    orch::append_jsonl(cal.path, fresh);
  }
  return rc;
}

json read_json_file(const std::string& path) {
  const std::string text = read_text_file(path);
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(path + ": " + e.what());
  }
}

void print_lease(const orch::Lease& l) {
  std::cout << l.id << '\t' << orch::to_string(l.state) << '\t' << l.request.requester << '\t' << l.request.start_s
            << '\t' << l.request.end_s << '\t';
  for (std::size_t i = 0; i < l.request.resources.size(); ++i)
    std::cout << (i ? "," : "") << l.request.resources[i].site << '/' << l.request.resources[i].device;
  std::cout << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ara-lab: wireless living-lab simulator"};
  app.require_subcommand(1);

  std::string out_root = default_output_root();
  std::string config_path;
  auto* run = app.add_subcommand("run", "Run a scenario config and write its results directory");
  run->add_option("config", config_path, "Scenario JSON file")->required()->check(CLI::ExistingFile);
  run->add_option("-o,--out", out_root, "Output root (default: $ARA_LAB_OUT or ./results)");

  auto* val = app.add_subcommand("validate", "Validate a scenario config without running it");
  val->add_option("config", config_path, "Scenario JSON file")->required()->check(CLI::ExistingFile);

  Calendar cal;
  cal.path = (fs::path(default_output_root()) / "calendar.jsonl").string();
  auto add_calendar_opts = [&](CLI::App* sub) {
    sub->add_option("--calendar", cal.path, "Lease calendar journal (JSON lines)");
    sub->add_option("--catalog", cal.catalog_path, "Platform catalog JSON");
    sub->add_option("--topology", cal.topology_path, "Topology JSON");
    sub->add_option("--radius", cal.radius, "Interference radius override in metres");
  };

  double at = 0.0;
  std::string input;
  auto* lease = app.add_subcommand("lease", "Lease calendar operations");
  lease->require_subcommand(1);
  auto* lease_req = lease->add_subcommand("request", "Submit a lease request");
  lease_req->add_option("request", input, "Lease request JSON file")->required()->check(CLI::ExistingFile);
  lease_req->add_option("--at", at, "Simulated submission time in seconds");
  add_calendar_opts(lease_req);
  auto* lease_list = lease->add_subcommand("list", "List leases");
  lease_list->add_option("--at", at, "Advance the calendar to this time first");
  add_calendar_opts(lease_list);

  auto* exp = app.add_subcommand("exp", "Experiment operations");
  exp->require_subcommand(1);
  auto* exp_launch = exp->add_subcommand("launch", "Launch an experiment on an active lease");
  exp_launch->add_option("spec", input, "Experiment spec JSON file")->required()->check(CLI::ExistingFile);
  exp_launch->add_option("--at", at, "Simulated launch time in seconds");
  add_calendar_opts(exp_launch);
  auto* exp_status = exp->add_subcommand("status", "Show experiment phases");
  exp_status->add_option("--at", at, "Time at which phases are reported");
  add_calendar_opts(exp_status);

  auto* guard = app.add_subcommand("guard", "Wireless guard");
  guard->require_subcommand(1);
  auto* audit = guard->add_subcommand("audit", "Check spectrum observations against active leases");
  audit->add_option("observations", input, "Observations, one JSON object per line")
      ->required()
      ->check(CLI::ExistingFile);
  add_calendar_opts(audit);

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      const auto cfg = load_scenario(config_path);
      const auto res = run_scenario(cfg, out_root);
      std::cout << res.output_dir << '\n';
      for (const auto& f : res.files) std::cout << "  " << f << '\n';
      return 0;
    }
    if (val->parsed()) {
      const auto cfg = load_scenario(config_path);
      validate_scenario(cfg);
      std::cout << config_path << ": ok (pipeline " << cfg.pipeline << ", hash " << config_hash(cfg) << ")\n";
      return 0;
    }
    if (lease_req->parsed()) {
      const auto req = orch::lease_request_from_json(read_json_file(input));
      return with_calendar(cal, [&](orch::Orchestrator& o) {
        const auto r = o.request_lease(req, std::max(at, o.now()));
        if (const auto* l = std::get_if<orch::Lease>(&r)) {
          print_lease(*l);
          return 0;
        }
        const auto& c = std::get<orch::Conflict>(r);
        std::cout << "conflict(" << orch::to_string(c.kind) << ") with " << c.blocking_lease << ": " << c.detail
                  << '\n';
        return 3;
      });
    }
    if (lease_list->parsed()) {
      return with_calendar(cal, [&](orch::Orchestrator& o) {
        if (at > o.now()) o.advance(at);
        for (const auto& [id, l] : o.leases()) print_lease(l);
        return 0;
      });
    }
    if (exp_launch->parsed()) {
      const auto spec = orch::experiment_spec_from_json(read_json_file(input));
      return with_calendar(cal, [&](orch::Orchestrator& o) {
        const auto r = o.launch_experiment(spec, std::max(at, o.now()));
        if (!r.ok) {
          std::cout << "refused: " << r.reason << '\n';
          return 3;
        }
        const auto& e = o.experiments().at(r.experiment_id);
        std::cout << e.id << "\tfetch " << e.timing.fetch_s << " s\tstart " << e.timing.start_s << " s\n";
        return 0;
      });
    }
    if (exp_status->parsed()) {
      return with_calendar(cal, [&](orch::Orchestrator& o) {
        const double t = std::max(at, o.now());
        for (const auto& [id, e] : o.experiments())
          std::cout << id << '\t' << e.spec.lease_id << '\t' << orch::to_string(e.phase_at(t)) << '\n';
        return 0;
      });
    }
    if (audit->parsed()) {
      std::vector<orch::SpectrumObservation> obs;
      std::istringstream is(read_text_file(input));
      std::string line;
      while (std::getline(is, line))
        if (!line.empty()) obs.push_back(orch::observation_from_json(json::parse(line)));
      return with_calendar(cal, [&](orch::Orchestrator& o) {
        const auto events = o.guard_check_spectrum(obs);
        for (const auto& e : events) std::cout << orch::to_json(e).dump() << '\n';
        return events.empty() ? 0 : 4;
      });
    }
  } catch (const json::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
