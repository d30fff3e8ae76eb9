#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "wavescrub/baselines.hpp"
#include "wavescrub/dwt.hpp"
#include "wavescrub/error.hpp"
#include "wavescrub/exec.hpp"
#include "wavescrub/metrics.hpp"
#include "wavescrub/scene.hpp"
#include "wavescrub/wtaa.hpp"

namespace wavescrub {

enum class Method { Wtaa, Gaussian, Downsample, Superpixel };
std::string_view to_string(Method m) noexcept;
Method parse_method(std::string_view name);

enum class StreamFormat { Auto, PpmSeq, Y4m };
std::string_view to_string(StreamFormat f) noexcept;
StreamFormat parse_format(std::string_view name);

/// Union of every method's knobs; only the ones belonging to the selected
/// method are read.
struct MethodParams {
    BasisId basis = BasisId::Cdf97;
    int levels = 4;
    /// Integral values destroy whole levels; fractional ones attenuate the
    /// next level (see graded_policy).
    double destroy_finest = 2.0;
    ColorMode color_mode = ColorMode::PerRgbChannel;
    /// Explicit {LH, HL, HH} gains per level (finest first); replaces
    /// destroy_finest when set.
    std::optional<std::vector<std::array<double, 3>>> gains;
    double approx_gain = 1.0;
    double sigma = 2.0;
    int factor = 8;
    int segments = 200;
    /// Roughly m = 10 in CIELAB units once colour is on a unit scale.
    double compactness = 0.1;
};

/// Parameter names owned by `m`, e.g. {"sigma"} for Gaussian.
const std::vector<std::string>& method_keys(Method m);
nlohmann::json params_to_json(Method m, const MethodParams& p);

using Anonymizer = std::function<Frame(const Frame&, Exec)>;

/// Validates the parameters up front and returns the per-frame operation.
Anonymizer make_anonymizer(Method m, const MethodParams& p);

// ---------------------------------------------------------------------------
// Exit codes: 1 usage/configuration, 2 input parse, 3 processing.

inline constexpr int kExitUsage = 1;
inline constexpr int kExitInput = 2;
inline constexpr int kExitProcessing = 3;

/// Raised for any failure while decoding input frames.
class InputError : public Error {
public:
    explicit InputError(const Error& cause) : Error(cause) {}
};

int exit_code_for(const Error& e) noexcept;

// ---------------------------------------------------------------------------

struct RunConfig {
    std::string input = "-";
    std::string output = "-";
    StreamFormat format = StreamFormat::Auto;
    Method method = Method::Wtaa;
    MethodParams params;
    NamedRegions regions;
    /// Metrics report path; empty disables it.
    std::string report;
    int threads = 1;
    /// WPYR dump of the first frame's pyramid after the policy; wtaa only.
    std::string dump_pyramid;
};

/// Strict: unknown keys and keys of other methods raise ConfigError.
/// "regions" may be an inline object or a path to a regions JSON file.
RunConfig run_config_from_json(const nlohmann::json& j);

struct AnonymizeSummary {
    std::size_t frames = 0;
    std::optional<MetricsReport> metrics;
};

/// Output format: "-" keeps the input format, *.y4m writes Y4M, *.ppm a
/// concatenated PPM stream, anything else a directory of numbered PPMs.
AnonymizeSummary cmd_anonymize(const RunConfig& cfg);

/// Report JSON written by cmd_anonymize.
nlohmann::json anonymize_report_json(const RunConfig& cfg, const AnonymizeSummary& s);

// ---------------------------------------------------------------------------

/// One method with a list of values for at most one of its parameters.
struct SweepSpec {
    Method method = Method::Wtaa;
    MethodParams base;
    /// Empty for a single point.
    std::string swept;
    std::vector<double> values;
};

/// Built-in grid for `m` over its usual parameter.
SweepSpec default_sweep(Method m, const MethodParams& base = {});

/// Every parameter point of the sweep, in sweep order.
std::vector<MethodParams> expand(const SweepSpec& s);

struct CompareConfig {
    /// Empty means the built-in synthetic scene with its own regions.
    std::string input;
    StreamFormat format = StreamFormat::Auto;
    NamedRegions regions;
    std::vector<SweepSpec> methods;
    std::string match_region = "near_figure";
    double target_psnr_db = 20.0;
    double tolerance_db = 1.0;
    std::string report;
    int threads = 0;
};

CompareConfig compare_config_from_json(const nlohmann::json& j);

struct ComparePoint {
    MethodParams params;
    MetricsReport metrics;
};

struct MethodComparison {
    Method method = Method::Wtaa;
    std::string swept;
    std::vector<ComparePoint> points;
    /// Point whose match-region PSNR is closest to the target; the earliest
    /// one on ties.
    std::size_t matched = 0;
    double matched_psnr_db = 0.0;
    bool within_tolerance = false;
};

struct CompareReport {
    std::size_t frames = 0;
    std::string match_region;
    double target_psnr_db = 0.0;
    double tolerance_db = 0.0;
    std::vector<MethodComparison> methods;
};

/// Runs every sweep point over `originals` and scores it against them.
CompareReport compare_frames(const std::vector<Frame>& originals, const NamedRegions& regions,
                             const CompareConfig& cfg);
CompareReport cmd_compare(const CompareConfig& cfg);
nlohmann::json to_json(const CompareReport& r);

// ---------------------------------------------------------------------------

struct SynthConfig {
    SceneParams scene;
    int frames = 1;
    std::string output = "-";
    StreamFormat format = StreamFormat::PpmSeq;
    /// Where the regions JSON goes; empty skips it.
    std::string regions_out;
};

SynthConfig synth_config_from_json(const nlohmann::json& j);
void cmd_synth(const SynthConfig& cfg);

// ---------------------------------------------------------------------------

struct BenchMethod {
    Method method = Method::Wtaa;
    MethodParams params;
};

struct BenchConfig {
    std::vector<BenchMethod> methods;
    int width = 256;
    int height = 256;
    int frames = 8;
    int runs = 5;
    int threads = 0;
};

BenchConfig bench_config_from_json(const nlohmann::json& j);

/// {"width","height","frames","runs","threads","methods":[{"method","params",
/// "samples_ms":[...],"median_ms","p95_ms"}]}; one sample per run, each the
/// mean per-frame wall time of that run.
nlohmann::json cmd_bench(const BenchConfig& cfg);

/// Nearest-rank percentile of `samples`, q in [0,1].
double percentile(std::vector<double> samples, double q);

// ---------------------------------------------------------------------------

nlohmann::json load_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);
/// Loads "-" (stdin) or a path, autodetecting the format when asked.
std::vector<Frame> read_all_frames(const std::string& path, StreamFormat format);

}  // namespace wavescrub
