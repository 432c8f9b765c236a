#pragma once

// Command implementations behind tools/wsntrack. Each returns a process exit
// code: 0 ok, 2 config error, 3 runtime error.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "wsntrack/config.hpp"
#include "wsntrack/csv.hpp"
#include "wsntrack/engine.hpp"
#include "wsntrack/mote.hpp"

namespace wsntrack {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitRuntime = 3;

struct RunOptions {
  std::string config_path;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;
  std::vector<std::string> overrides;
};

namespace detail {

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write '" + path.string() + "'");
  os << text;
  if (!os) throw std::runtime_error("write failed for '" + path.string() + "'");
}

template <typename Fn>
std::string render(Fn&& fn) {
  std::ostringstream os;
  fn(os);
  return os.str();
}

inline ScenarioConfig load_with_overrides(const RunOptions& o) {
  ScenarioConfig c = load_config(o.config_path);
  for (const auto& kv : o.overrides) apply_override(c, kv);
  if (o.seed) c.seed = *o.seed;
  return c;
}

template <typename Fn>
int guarded(std::ostream& err, Fn&& fn) {
  try {
    return fn();
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const Error& e) {
    if (e.code() == ErrorCode::InvalidConfig || e.code() == ErrorCode::ConfigParse) {
      err << "config error: " << e.what() << '\n';
      return kExitConfig;
    }
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
}

}  // namespace detail

inline int cmd_run(const RunOptions& o, std::ostream& err = std::cerr) {
  return detail::guarded(err, [&] {
    const auto cfg = detail::load_with_overrides(o);
    cfg.validate();
    const auto result = run(cfg);
    const std::filesystem::path out(o.out_dir);
    std::filesystem::create_directories(out);
    detail::write_text(out / "trace.csv", detail::render([&](std::ostream& os) { write_trace(os, result.records); }));
    detail::write_text(out / "metrics.csv", detail::render([&](std::ostream& os) { write_metrics(os, result.metrics); }));
    detail::write_text(out / "summary.txt", detail::render([&](std::ostream& os) { write_summary(os, result.summary); }));
    return kExitOk;
  });
}

inline std::optional<CompareMode> parse_compare_mode(const std::string& s) {
  if (s == "baseline") return CompareMode::Baseline;
  if (s == "anchors34") return CompareMode::Anchors34;
  if (s == "piggyback") return CompareMode::Piggyback;
  return std::nullopt;
}

inline int cmd_compare(const RunOptions& o, const std::string& mode, std::ostream& err = std::cerr) {
  return detail::guarded(err, [&] {
    const auto m = parse_compare_mode(mode);
    if (!m) throw ConfigError(0, "unknown compare mode '" + mode + "'");
    const auto cfg = detail::load_with_overrides(o);
    const auto result = run_comparison(cfg, *m);
    const std::filesystem::path out(o.out_dir);
    std::filesystem::create_directories(out);
    detail::write_text(out / "comparison.csv", detail::render([&](std::ostream& os) { write_comparison(os, result); }));
    detail::write_text(out / "summary_a.txt", detail::render([&](std::ostream& os) {
                         for (const auto& p : result.runs) write_summary(os, p.a, "seed" + std::to_string(p.seed) + ".");
                       }));
    detail::write_text(out / "summary_b.txt", detail::render([&](std::ostream& os) {
                         for (const auto& p : result.runs) write_summary(os, p.b, "seed" + std::to_string(p.seed) + ".");
                       }));
    detail::write_text(out / "comparison_summary.txt",
                       detail::render([&](std::ostream& os) { write_comparison_summary(os, result); }));
    return kExitOk;
  });
}

inline int cmd_phase(const PhaseParams& p, const std::string& out_dir, std::ostream& err = std::cerr) {
  return detail::guarded(err, [&] {
    if (p.targets < 1 || p.per_target < 1) throw Error(ErrorCode::InvalidConfig, "targets and per_target must be >= 1");
    if (p.densities.empty()) throw Error(ErrorCode::InvalidConfig, "no densities given");
    for (double d : p.densities)
      if (!(d >= 0.0)) throw Error(ErrorCode::InvalidConfig, "densities must be >= 0");
    const auto curve = phase_transition_curve(p);
    const std::filesystem::path out(out_dir);
    std::filesystem::create_directories(out);
    detail::write_text(out / "phase.csv", detail::render([&](std::ostream& os) { write_phase(os, curve); }));
    return kExitOk;
  });
}

inline int cmd_mote_table(const std::string& data_path, const std::string& out_dir, std::ostream& err = std::cerr) {
  return detail::guarded(err, [&] {
    const auto content = read_file(data_path);
    if (sha256_hex(content) != kMoteSha256) throw std::runtime_error("mote table checksum mismatch: " + data_path);
    const auto rows = parse_mote_table(content);
    if (!db_dominates(rows)) throw std::runtime_error("mote table: DB column exceeds another column");
    const std::filesystem::path out(out_dir);
    std::filesystem::create_directories(out);
    detail::write_text(out / "mote_load.csv", detail::render([&](std::ostream& os) { write_mote_load(os, rows); }));
    detail::write_text(out / "mote_load_long.csv", detail::render([&](std::ostream& os) { write_mote_long(os, rows); }));
    return kExitOk;
  });
}

}  // namespace wsntrack
