#pragma once

#include "mbsed/calibration.hpp"
#include "mbsed/config.hpp"
#include "mbsed/spectroscopy.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace mbsed::cli {

enum ExitCode { kOk = 0, kValidation = 1, kNotConverged = 2, kInternal = 3 };

struct CommonOptions {
    std::string config;
    std::string out;
    std::optional<std::uint64_t> seed;
    int threads = 0;
    bool svg = false;
    std::string command_line;
};

/// Loads the config, then applies MBSED_SEED and finally --seed.
Config load(const CommonOptions& opt);

/// Key-value manifest describing how an output directory was produced.
class Manifest {
public:
    Manifest(const CommonOptions& opt, const Config& cfg);
    void output(const std::filesystem::path& file);
    void note(const std::string& key, const std::string& value);
    void write(const std::filesystem::path& dir) const;

private:
    std::string version_, command_, started_, config_text_;
    std::uint64_t seed_ = 0;
    std::vector<std::pair<std::string, std::string>> notes_;
    std::vector<std::string> outputs_;
};

/// shift.csv, spectrum*.csv (+ SVG) for one protocol run.  Returns the
/// written paths relative to dir.
std::vector<std::filesystem::path> write_run(const ProtocolRun& run, const Config& cfg,
                                             const std::filesystem::path& dir, bool svg,
                                             const std::string& stem = "");

/// Runs a protocol with a textual progress line on stderr.
ProtocolRun run_with_progress(const Config& cfg, const std::string& label);

int cmd_sample_stats(const CommonOptions& opt, const std::vector<double>& tz, const std::vector<double>& tr,
                     int ensembles);
int cmd_couplings_dump(const CommonOptions& opt, int samples);
int cmd_protocol(const CommonOptions& opt, std::optional<Protocol> kind, int scan_points);
int cmd_fit(const CommonOptions& opt, const std::string& data, int n_exp, int n_sim, int samples,
            const FitOptions& fit);
/// Bundled figure recipes; `samples` (> 0) overrides the reduced default.
int cmd_reproduce(const CommonOptions& opt, const std::string& figure, int samples);
std::vector<std::string> reproducible_figures();

} // namespace mbsed::cli
