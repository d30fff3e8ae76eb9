#include "wavescrub/app.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <set>
#include <sstream>

#include "wavescrub/pipeline.hpp"
#include "wavescrub/video_io.hpp"

namespace wavescrub {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

[[noreturn]] void config_error(const std::string& what) { throw Error(ErrorCode::ConfigError, what); }

void reject_unknown(const json& j, const std::set<std::string>& allowed, const std::string& where) {
    if (!j.is_object()) config_error(where + " must be a JSON object");
    for (const auto& [key, unused] : j.items()) {
        if (!allowed.count(key)) config_error(where + ": unknown key '" + key + "'");
    }
}

template <class T>
T get_as(const json& j, const std::string& key) {
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        config_error("'" + key + "': " + e.what());
    }
}

int integral(double v, const std::string& key) {
    if (!std::isfinite(v) || v != std::floor(v) || std::abs(v) > 1e9) {
        config_error("'" + key + "' must be an integer, got " + std::to_string(v));
    }
    return static_cast<int>(v);
}

double number(const json& v, const std::string& key) {
    if (!v.is_number()) config_error("'" + key + "' must be a number");
    return v.get<double>();
}

const std::set<std::string>& all_param_keys() {
    static const std::set<std::string> keys = {"basis", "levels",   "destroy_finest", "color_mode",  "gains",
                                               "approx_gain", "sigma", "factor", "segments", "compactness"};
    return keys;
}

bool owns(Method m, const std::string& key) {
    const auto& keys = method_keys(m);
    return std::find(keys.begin(), keys.end(), key) != keys.end();
}

bool is_numeric_param(const std::string& key) { return key != "basis" && key != "color_mode" && key != "gains"; }

/// Writes one numeric parameter; `key` must be numeric.
void set_param(MethodParams& p, const std::string& key, double v) {
    if (key == "levels") p.levels = integral(v, key);
    else if (key == "destroy_finest") p.destroy_finest = v;
    else if (key == "sigma") p.sigma = v;
    else if (key == "factor") p.factor = integral(v, key);
    else if (key == "segments") p.segments = integral(v, key);
    else if (key == "compactness") p.compactness = v;
    else if (key == "approx_gain") p.approx_gain = v;
    else config_error("'" + key + "' cannot be swept");
}

void set_param(MethodParams& p, const std::string& key, const json& v) {
    if (key == "basis") {
        if (!v.is_string()) config_error("'basis' must be a string");
        try {
            p.basis = parse_basis(v.get<std::string>());
        } catch (const Error& e) {
            config_error(e.what());
        }
    } else if (key == "color_mode") {
        if (!v.is_string()) config_error("'color_mode' must be a string");
        try {
            p.color_mode = parse_color_mode(v.get<std::string>());
        } catch (const Error& e) {
            config_error(e.what());
        }
    } else if (key == "gains") {
        if (!v.is_array()) config_error("'gains' must be an array of [LH, HL, HH] triples");
        std::vector<std::array<double, 3>> table;
        for (const auto& row : v) {
            if (!row.is_array() || row.size() != 3) config_error("'gains' rows must be [LH, HL, HH]");
            table.push_back({number(row[0], key), number(row[1], key), number(row[2], key)});
        }
        p.gains = std::move(table);
    } else {
        set_param(p, key, number(v, key));
    }
}

double round_grid(double v) { return std::round(v * 1e9) / 1e9; }

/// A list, a {"from","to","step"} range, or std::nullopt for a scalar.
std::optional<std::vector<double>> sweep_values(const json& v, const std::string& key) {
    if (v.is_array()) {
        std::vector<double> out;
        for (const auto& e : v) out.push_back(number(e, key));
        if (out.empty()) config_error("'" + key + "' sweep is empty");
        return out;
    }
    if (v.is_object()) {
        reject_unknown(v, {"from", "to", "step"}, "'" + key + "' range");
        const double from = number(v.at("from"), key);
        const double to = v.contains("to") ? number(v.at("to"), key) : from;
        const double step = v.contains("step") ? number(v.at("step"), key) : 1.0;
        if (!(step > 0.0) || to < from) config_error("'" + key + "' range needs from <= to and step > 0");
        const auto n = static_cast<long>(std::floor((to - from) / step + 1e-9));
        if (n > 100000) config_error("'" + key + "' range has too many points");
        std::vector<double> out;
        for (long i = 0; i <= n; ++i) out.push_back(round_grid(from + static_cast<double>(i) * step));
        return out;
    }
    return std::nullopt;
}

NamedRegions regions_from(const json& v) {
    if (v.is_string()) return regions_from_json(load_json_file(v.get<std::string>()));
    return regions_from_json(v);
}

/// Rethrows decoder failures as InputError so they map to the input exit code.
class TaggedSource final : public FrameSource {
public:
    explicit TaggedSource(std::unique_ptr<FrameSource> inner) : inner_(std::move(inner)) {}
    std::optional<Frame> next() override {
        try {
            return inner_->next();
        } catch (const InputError&) {
            throw;
        } catch (const Error& e) {
            throw InputError(e);
        }
    }

private:
    std::unique_ptr<FrameSource> inner_;
};

struct Input {
    std::unique_ptr<std::ifstream> file;
    std::unique_ptr<FrameSource> source;
    std::optional<VideoStreamHeader> y4m;
    StreamFormat format = StreamFormat::Auto;
};

Input open_input(const std::string& path, StreamFormat format) {
    Input in;
    try {
        if (path != "-" && fs::is_directory(path)) {
            if (format == StreamFormat::Y4m) throw Error(ErrorCode::IoError, path + " is a directory, not a Y4M file");
            in.format = StreamFormat::PpmSeq;
            in.source = std::make_unique<TaggedSource>(std::make_unique<PpmSequenceReader>(list_ppm_files(path)));
            return in;
        }
        std::istream* stream = &std::cin;
        if (path != "-") {
            in.file = std::make_unique<std::ifstream>(path, std::ios::binary);
            if (!*in.file) throw Error(ErrorCode::IoError, "cannot open " + path);
            stream = in.file.get();
        }
        if (format == StreamFormat::Auto) {
            const int c = stream->peek();
            if (c == 'Y') format = StreamFormat::Y4m;
            else if (c == 'P') format = StreamFormat::PpmSeq;
            else throw Error(ErrorCode::BadMagic, "cannot tell the input format of " + path);
        }
        in.format = format;
        if (format == StreamFormat::Y4m) {
            auto reader = std::make_unique<Y4mReader>(*stream);
            in.y4m = reader->header();
            in.source = std::make_unique<TaggedSource>(std::move(reader));
        } else {
            in.source = std::make_unique<TaggedSource>(std::make_unique<PpmSequenceReader>(*stream));
        }
    } catch (const InputError&) {
        throw;
    } catch (const Error& e) {
        throw InputError(e);
    }
    return in;
}

/// Y4M writer whose header waits for the first frame when the input had none.
class LazyY4mSink final : public FrameSink {
public:
    LazyY4mSink(std::ostream& out, std::optional<VideoStreamHeader> header) : out_(out), header_(std::move(header)) {}

    void write(const Frame& f) override {
        if (!writer_) {
            VideoStreamHeader h;
            if (header_) {
                h = *header_;
            } else {
                h.width = f.width();
                h.height = f.height();
                h.chroma = ChromaFormat::C444;
                h.chroma_token = "444";
            }
            writer_ = std::make_unique<Y4mWriter>(out_, h);
        }
        writer_->write(f);
    }

    void finish() override {
        if (!writer_ && header_) writer_ = std::make_unique<Y4mWriter>(out_, *header_);
        if (writer_) writer_->finish();
        out_.flush();
    }

private:
    std::ostream& out_;
    std::optional<VideoStreamHeader> header_;
    std::unique_ptr<Y4mWriter> writer_;
};

struct Output {
    std::unique_ptr<std::ofstream> file;
    std::unique_ptr<FrameSink> sink;
};

bool has_extension(const std::string& path, const char* ext) {
    return fs::path(path).extension() == ext;
}

Output open_output(const std::string& path, StreamFormat format, std::optional<VideoStreamHeader> y4m) {
    Output out;
    const bool to_dir = path != "-" && (fs::is_directory(path) || path.back() == '/' ||
                                        (!has_extension(path, ".ppm") && !has_extension(path, ".y4m")));
    if (path != "-") {
        if (has_extension(path, ".y4m")) format = StreamFormat::Y4m;
        else if (has_extension(path, ".ppm") || to_dir) format = StreamFormat::PpmSeq;
    }
    if (format == StreamFormat::Auto) format = StreamFormat::PpmSeq;
    if (to_dir) {
        out.sink = std::make_unique<PpmSequenceWriter>(fs::path(path));
        return out;
    }
    std::ostream* stream = &std::cout;
    if (path != "-") {
        out.file = std::make_unique<std::ofstream>(path, std::ios::binary | std::ios::trunc);
        if (!*out.file) throw Error(ErrorCode::IoError, "cannot create " + path);
        stream = out.file.get();
    }
    if (format == StreamFormat::Y4m) out.sink = std::make_unique<LazyY4mSink>(*stream, std::move(y4m));
    else out.sink = std::make_unique<PpmSequenceWriter>(*stream);
    return out;
}

WtaaConfig wtaa_config(const MethodParams& p) {
    if (p.levels < 1) throw Error(ErrorCode::InvalidDepth, "levels must be >= 1");
    WtaaConfig cfg;
    cfg.basis = WaveletBasis::make(p.basis);
    cfg.colorspace_mode = p.color_mode;
    if (p.gains) {
        cfg.policy.levels = p.levels;
        cfg.policy.gains = *p.gains;
        cfg.policy.approx_gain = p.approx_gain;
        cfg.policy.validate();
        return cfg;
    }
    cfg.policy = graded_policy(p.levels, p.destroy_finest);
    cfg.policy.approx_gain = p.approx_gain;
    cfg.policy.validate();
    if (p.color_mode == ColorMode::LumaChroma) {
        cfg.chroma_policy = graded_policy(p.levels, std::max(0.0, p.destroy_finest - 1.0));
        cfg.chroma_policy->approx_gain = p.approx_gain;
    }
    return cfg;
}

std::vector<Pyramid> policy_pyramids(const Frame& f, const WtaaConfig& cfg) {
    Frame src = f;
    if (cfg.colorspace_mode == ColorMode::LumaChroma && f.colorspace() == Colorspace::RGB) src = rgb_to_ycbcr(f);
    std::vector<Pyramid> out;
    for (int c = 0; c < src.channels(); ++c) {
        const DestructionPolicy& policy =
            (c > 0 && cfg.chroma_policy && cfg.colorspace_mode == ColorMode::LumaChroma) ? *cfg.chroma_policy
                                                                                          : cfg.policy;
        out.push_back(apply_policy(decompose(src.channel(c), cfg.basis, policy.levels, Exec::Serial), policy));
    }
    return out;
}

void sweep_method_entry(const json& e, SweepSpec& spec) {
    reject_unknown(e, [] {
        auto keys = all_param_keys();
        keys.insert("method");
        return keys;
    }(), "compare method entry");
    if (!e.contains("method")) config_error("compare method entry lacks 'method'");
    try {
        spec.method = parse_method(get_as<std::string>(e, "method"));
    } catch (const Error& err) {
        config_error(err.what());
    }
    for (const auto& [key, v] : e.items()) {
        if (key == "method") continue;
        if (!owns(spec.method, key)) {
            config_error("'" + key + "' does not apply to method " + std::string(to_string(spec.method)));
        }
        if (auto values = is_numeric_param(key) ? sweep_values(v, key) : std::nullopt) {
            if (!spec.swept.empty()) config_error("only one parameter per method entry may be swept");
            spec.swept = key;
            spec.values = *values;
        } else {
            set_param(spec.base, key, v);
        }
    }
    // Without a list, the method's usual parameter gets its built-in grid
    // unless it was pinned to a single value.
    if (spec.swept.empty()) {
        SweepSpec grid = default_sweep(spec.method, spec.base);
        if (!e.contains(grid.swept)) spec = std::move(grid);
    }
}

}  // namespace

// ---------------------------------------------------------------------------

std::string_view to_string(Method m) noexcept {
    switch (m) {
    case Method::Wtaa: return "wtaa";
    case Method::Gaussian: return "gaussian";
    case Method::Downsample: return "downsample";
    case Method::Superpixel: return "superpixel";
    }
    return "?";
}

Method parse_method(std::string_view name) {
    if (name == "wtaa") return Method::Wtaa;
    if (name == "gaussian") return Method::Gaussian;
    if (name == "downsample") return Method::Downsample;
    if (name == "superpixel") return Method::Superpixel;
    throw Error(ErrorCode::ConfigError, "unknown method '" + std::string(name) + "'");
}

std::string_view to_string(StreamFormat f) noexcept {
    switch (f) {
    case StreamFormat::Auto: return "auto";
    case StreamFormat::PpmSeq: return "ppm-seq";
    case StreamFormat::Y4m: return "y4m";
    }
    return "?";
}

StreamFormat parse_format(std::string_view name) {
    if (name == "auto") return StreamFormat::Auto;
    if (name == "ppm-seq") return StreamFormat::PpmSeq;
    if (name == "y4m") return StreamFormat::Y4m;
    throw Error(ErrorCode::ConfigError, "unknown format '" + std::string(name) + "'");
}

const std::vector<std::string>& method_keys(Method m) {
    static const std::vector<std::string> wtaa = {"basis",      "levels", "destroy_finest",
                                                  "color_mode", "gains",  "approx_gain"};
    static const std::vector<std::string> gaussian = {"sigma"};
    static const std::vector<std::string> downsample = {"factor"};
    static const std::vector<std::string> superpixel = {"segments", "compactness"};
    switch (m) {
    case Method::Wtaa: return wtaa;
    case Method::Gaussian: return gaussian;
    case Method::Downsample: return downsample;
    case Method::Superpixel: return superpixel;
    }
    return wtaa;
}

json params_to_json(Method m, const MethodParams& p) {
    switch (m) {
    case Method::Wtaa: {
        json j = {{"basis", to_string(p.basis)}, {"levels", p.levels}, {"color_mode", to_string(p.color_mode)}};
        if (p.gains) j["gains"] = *p.gains;
        else j["destroy_finest"] = p.destroy_finest;
        if (p.approx_gain != 1.0) j["approx_gain"] = p.approx_gain;
        return j;
    }
    case Method::Gaussian: return {{"sigma", p.sigma}};
    case Method::Downsample: return {{"factor", p.factor}};
    case Method::Superpixel: return {{"segments", p.segments}, {"compactness", p.compactness}};
    }
    return json::object();
}

Anonymizer make_anonymizer(Method m, const MethodParams& p) {
    switch (m) {
    case Method::Wtaa: {
        auto cfg = wtaa_config(p);
        return [cfg](const Frame& f, Exec exec) { return anonymize_wtaa(f, cfg, exec); };
    }
    case Method::Gaussian: {
        const GaussianParams g{p.sigma};
        (void)g.radius();
        return [g](const Frame& f, Exec exec) { return gaussian_blur(f, g, exec); };
    }
    case Method::Downsample: {
        if (p.factor < 2) throw Error(ErrorCode::InvalidFactor, "factor must be >= 2");
        const DownsampleParams d{p.factor};
        return [d](const Frame& f, Exec) { return downsample_anonymize(f, d); };
    }
    case Method::Superpixel: {
        if (p.segments < 2) throw Error(ErrorCode::InvalidParameter, "segments must be >= 2");
        if (!(p.compactness > 0.0) || !std::isfinite(p.compactness)) {
            throw Error(ErrorCode::InvalidParameter, "compactness must be > 0");
        }
        const SlicParams s{p.segments, p.compactness, 10};
        return [s](const Frame& f, Exec exec) { return superpixel_anonymize(f, s, exec); };
    }
    }
    throw Error(ErrorCode::ConfigError, "unknown method");
}

int exit_code_for(const Error& e) noexcept {
    if (dynamic_cast<const InputError*>(&e)) return kExitInput;
    switch (e.code()) {
    case ErrorCode::ConfigError:
    case ErrorCode::InvalidParameter:
    case ErrorCode::InvalidSigma:
    case ErrorCode::InvalidFactor:
    case ErrorCode::InvalidDepth:
    case ErrorCode::InvalidGain:
    case ErrorCode::PolicyLevelMismatch:
    case ErrorCode::SceneTooSmall:
    case ErrorCode::RegionOutOfBounds:
    case ErrorCode::OverlappingRegions:
        return kExitUsage;
    case ErrorCode::BadMagic:
    case ErrorCode::MalformedHeader:
    case ErrorCode::TruncatedPayload:
    case ErrorCode::UnsupportedMaxval:
    case ErrorCode::BadSignature:
    case ErrorCode::HeaderParamMissing:
    case ErrorCode::UnsupportedFormat:
    case ErrorCode::FrameMarkerMissing:
    case ErrorCode::ShortFrame:
        return kExitInput;
    default:
        return kExitProcessing;
    }
}

// ---------------------------------------------------------------------------

RunConfig run_config_from_json(const json& j) {
    auto allowed = all_param_keys();
    for (const char* k : {"input", "output", "format", "method", "regions", "report", "threads", "dump_pyramid"}) {
        allowed.insert(k);
    }
    reject_unknown(j, allowed, "config");

    RunConfig cfg;
    try {
        if (j.contains("input")) cfg.input = get_as<std::string>(j, "input");
        if (j.contains("output")) cfg.output = get_as<std::string>(j, "output");
        if (j.contains("format")) cfg.format = parse_format(get_as<std::string>(j, "format"));
        if (j.contains("method")) cfg.method = parse_method(get_as<std::string>(j, "method"));
        if (j.contains("report")) cfg.report = get_as<std::string>(j, "report");
        if (j.contains("dump_pyramid")) cfg.dump_pyramid = get_as<std::string>(j, "dump_pyramid");
        if (j.contains("threads")) cfg.threads = integral(number(j.at("threads"), "threads"), "threads");
        if (j.contains("regions")) cfg.regions = regions_from(j.at("regions"));
    } catch (const json::exception& e) {
        config_error(e.what());
    }
    for (const auto& key : all_param_keys()) {
        if (!j.contains(key)) continue;
        if (!owns(cfg.method, key)) {
            config_error("'" + key + "' does not apply to method " + std::string(to_string(cfg.method)));
        }
        set_param(cfg.params, key, j.at(key));
    }
    if (cfg.threads < 1) config_error("threads must be >= 1");
    if (!cfg.dump_pyramid.empty() && cfg.method != Method::Wtaa) config_error("dump_pyramid needs method wtaa");
    return cfg;
}

AnonymizeSummary cmd_anonymize(const RunConfig& cfg) {
    if (cfg.threads < 1) config_error("threads must be >= 1");
    const Anonymizer anon = make_anonymizer(cfg.method, cfg.params);
    std::optional<WtaaConfig> dump_cfg;
    if (!cfg.dump_pyramid.empty()) {
        if (cfg.method != Method::Wtaa) config_error("--dump-pyramid needs method wtaa");
        dump_cfg = wtaa_config(cfg.params);
    }
    const bool want_metrics = !cfg.report.empty();

    Input in = open_input(cfg.input, cfg.format);
    Output out = open_output(cfg.output, in.format, in.y4m);

    struct Result {
        Frame frame;
        std::optional<MetricsReport> metrics;
        std::vector<Pyramid> dump;
    };
    std::vector<MetricsReport> reports;

    // Workers already run one frame each, so kernels stay serial inside them.
    const std::function<Result(std::size_t, Frame)> work = [&](std::size_t index, Frame f) {
        Result r;
        r.frame = anon(f, Exec::Serial);
        if (want_metrics) r.metrics = evaluate(f, r.frame, cfg.regions, Exec::Serial);
        if (dump_cfg && index == 0) r.dump = policy_pyramids(f, *dump_cfg);
        return r;
    };
    const std::function<void(std::size_t, Result&)> emit = [&](std::size_t index, Result& r) {
        out.sink->write(r.frame);
        if (r.metrics) reports.push_back(std::move(*r.metrics));
        if (dump_cfg && index == 0) {
            std::ofstream dump(cfg.dump_pyramid, std::ios::binary | std::ios::trunc);
            if (!dump) throw Error(ErrorCode::IoError, "cannot create " + cfg.dump_pyramid);
            write_pyramid_dump(dump, r.dump);
        }
    };

    AnonymizeSummary summary;
    summary.frames = run_ordered<Result>(*in.source, cfg.threads, work, emit);
    out.sink->finish();
    if (out.file) {
        out.file->close();
        if (!*out.file) throw Error(ErrorCode::IoError, "failed writing " + cfg.output);
    }
    if (want_metrics && !reports.empty()) summary.metrics = average(reports);
    if (want_metrics) write_text_file(cfg.report, anonymize_report_json(cfg, summary).dump(2) + "\n");
    return summary;
}

json anonymize_report_json(const RunConfig& cfg, const AnonymizeSummary& s) {
    json j = {{"method", to_string(cfg.method)},
              {"params", params_to_json(cfg.method, cfg.params)},
              {"frames", s.frames}};
    j["metrics"] = s.metrics ? to_json(*s.metrics) : json(nullptr);
    return j;
}

// ---------------------------------------------------------------------------

SweepSpec default_sweep(Method m, const MethodParams& base) {
    SweepSpec s;
    s.method = m;
    s.base = base;
    switch (m) {
    case Method::Wtaa:
        s.swept = "destroy_finest";
        for (int i = 0; i <= 4 * base.levels; ++i) s.values.push_back(0.25 * i);
        break;
    case Method::Gaussian:
        s.swept = "sigma";
        for (int i = 5; i <= 80; ++i) s.values.push_back(round_grid(0.1 * i));
        break;
    case Method::Downsample:
        s.swept = "factor";
        for (int f = 2; f <= 32; ++f) s.values.push_back(f);
        break;
    case Method::Superpixel:
        s.swept = "segments";
        s.values = {32, 48, 64, 96, 128, 160, 192, 224, 256, 320, 384, 448, 512, 640, 768, 896, 1024, 1280, 1536, 2048};
        break;
    }
    return s;
}

std::vector<MethodParams> expand(const SweepSpec& s) {
    if (s.swept.empty()) return {s.base};
    std::vector<MethodParams> out;
    for (double v : s.values) {
        MethodParams p = s.base;
        set_param(p, s.swept, v);
        out.push_back(p);
    }
    return out;
}

CompareConfig compare_config_from_json(const json& j) {
    reject_unknown(j,
                   {"input", "format", "regions", "methods", "match_region", "target_psnr_db", "tolerance_db", "report",
                    "threads"},
                   "compare config");
    CompareConfig cfg;
    try {
        if (j.contains("input")) cfg.input = get_as<std::string>(j, "input");
        if (j.contains("format")) cfg.format = parse_format(get_as<std::string>(j, "format"));
        if (j.contains("regions")) cfg.regions = regions_from(j.at("regions"));
        if (j.contains("match_region")) cfg.match_region = get_as<std::string>(j, "match_region");
        if (j.contains("target_psnr_db")) cfg.target_psnr_db = number(j.at("target_psnr_db"), "target_psnr_db");
        if (j.contains("tolerance_db")) cfg.tolerance_db = number(j.at("tolerance_db"), "tolerance_db");
        if (j.contains("report")) cfg.report = get_as<std::string>(j, "report");
        if (j.contains("threads")) cfg.threads = integral(number(j.at("threads"), "threads"), "threads");
    } catch (const json::exception& e) {
        config_error(e.what());
    }
    if (j.contains("methods")) {
        const json& methods = j.at("methods");
        if (!methods.is_array()) config_error("'methods' must be an array");
        for (const auto& e : methods) {
            SweepSpec spec;
            sweep_method_entry(e, spec);
            cfg.methods.push_back(std::move(spec));
        }
    }
    if (cfg.threads < 0) config_error("threads must be >= 0");
    if (!(cfg.tolerance_db >= 0.0)) config_error("tolerance_db must be >= 0");
    return cfg;
}

CompareReport compare_frames(const std::vector<Frame>& originals, const NamedRegions& regions,
                             const CompareConfig& cfg) {
    if (cfg.methods.size() < 2) config_error("compare needs at least two methods");
    if (originals.empty()) throw Error(ErrorCode::InvalidParameter, "compare needs at least one frame");
    if (!regions.count(cfg.match_region)) config_error("match region '" + cfg.match_region + "' is not defined");
    for (const auto& [name, r] : regions) {
        if (!r.inside(originals.front().size())) {
            throw Error(ErrorCode::RegionOutOfBounds, "region '" + name + "' lies outside the frame");
        }
    }
    // Parameters are validated for every point before any work starts.
    std::vector<std::vector<std::pair<MethodParams, Anonymizer>>> plans;
    for (const auto& spec : cfg.methods) {
        std::vector<std::pair<MethodParams, Anonymizer>> plan;
        for (const auto& p : expand(spec)) plan.emplace_back(p, make_anonymizer(spec.method, p));
        plans.push_back(std::move(plan));
    }

    CompareReport report;
    report.frames = originals.size();
    report.match_region = cfg.match_region;
    report.target_psnr_db = cfg.target_psnr_db;
    report.tolerance_db = cfg.tolerance_db;
    for (std::size_t m = 0; m < cfg.methods.size(); ++m) {
        MethodComparison mc;
        mc.method = cfg.methods[m].method;
        mc.swept = cfg.methods[m].swept;
        double best = 0.0;
        for (const auto& [params, anon] : plans[m]) {
            std::vector<MetricsReport> per_frame;
            for (const auto& f : originals) per_frame.push_back(evaluate(f, anon(f, Exec::Parallel), regions));
            ComparePoint point{params, average(per_frame)};
            const double psnr_db = point.metrics.per_region.at(cfg.match_region).psnr_db;
            const double dist = std::abs(psnr_db - cfg.target_psnr_db);
            if (mc.points.empty() || dist < best) {
                best = dist;
                mc.matched = mc.points.size();
                mc.matched_psnr_db = psnr_db;
            }
            mc.points.push_back(std::move(point));
        }
        mc.within_tolerance = best <= cfg.tolerance_db;
        report.methods.push_back(std::move(mc));
    }
    return report;
}

CompareReport cmd_compare(const CompareConfig& cfg) {
    if (cfg.threads > 0) set_kernel_threads(cfg.threads);
    std::vector<Frame> frames;
    NamedRegions regions = cfg.regions;
    if (cfg.input.empty()) {
        Scene scene = make_near_far_scene();
        frames.push_back(std::move(scene.frame));
        if (regions.empty()) regions = scene.regions;
    } else {
        frames = read_all_frames(cfg.input, cfg.format);
    }
    CompareReport report = compare_frames(frames, regions, cfg);
    if (!cfg.report.empty()) write_text_file(cfg.report, to_json(report).dump(2) + "\n");
    return report;
}

json to_json(const CompareReport& r) {
    json methods = json::array();
    for (const auto& mc : r.methods) {
        json points = json::array();
        for (const auto& p : mc.points) {
            points.push_back({{"params", params_to_json(mc.method, p.params)}, {"metrics", to_json(p.metrics)}});
        }
        methods.push_back({{"method", to_string(mc.method)},
                           {"swept", mc.swept.empty() ? json(nullptr) : json(mc.swept)},
                           {"points", std::move(points)},
                           {"matched",
                            {{"index", mc.matched},
                             {"params", params_to_json(mc.method, mc.points.at(mc.matched).params)},
                             {"psnr_db", round6(mc.matched_psnr_db)},
                             {"within_tolerance", mc.within_tolerance}}}});
    }
    return {{"frames", r.frames},
            {"match_region", r.match_region},
            {"target_psnr_db", r.target_psnr_db},
            {"tolerance_db", r.tolerance_db},
            {"methods", std::move(methods)}};
}

// ---------------------------------------------------------------------------

SynthConfig synth_config_from_json(const json& j) {
    reject_unknown(j,
                   {"width", "height", "figure_contrast", "stripe_amplitude", "noise", "seed", "frames", "output",
                    "format", "regions"},
                   "synth config");
    SynthConfig cfg;
    try {
        if (j.contains("width")) cfg.scene.width = get_as<int>(j, "width");
        if (j.contains("height")) cfg.scene.height = get_as<int>(j, "height");
        if (j.contains("figure_contrast")) cfg.scene.figure_contrast = get_as<double>(j, "figure_contrast");
        if (j.contains("stripe_amplitude")) cfg.scene.stripe_amplitude = get_as<double>(j, "stripe_amplitude");
        if (j.contains("noise")) cfg.scene.noise = get_as<double>(j, "noise");
        if (j.contains("seed")) cfg.scene.seed = get_as<std::uint64_t>(j, "seed");
        if (j.contains("frames")) cfg.frames = get_as<int>(j, "frames");
        if (j.contains("output")) cfg.output = get_as<std::string>(j, "output");
        if (j.contains("format")) cfg.format = parse_format(get_as<std::string>(j, "format"));
        if (j.contains("regions")) cfg.regions_out = get_as<std::string>(j, "regions");
    } catch (const json::exception& e) {
        config_error(e.what());
    }
    if (cfg.frames < 1) config_error("frames must be >= 1");
    return cfg;
}

void cmd_synth(const SynthConfig& cfg) {
    if (cfg.frames < 1) config_error("frames must be >= 1");
    // Build the first scene before touching the output so bad parameters
    // leave no partial files behind.
    Scene first = make_near_far_scene(cfg.scene);
    Output out = open_output(cfg.output, cfg.format == StreamFormat::Auto ? StreamFormat::PpmSeq : cfg.format,
                             std::nullopt);
    out.sink->write(first.frame);
    for (int i = 1; i < cfg.frames; ++i) {
        SceneParams p = cfg.scene;
        p.seed = cfg.scene.seed + static_cast<std::uint64_t>(i);
        out.sink->write(make_near_far_scene(p).frame);
    }
    out.sink->finish();
    if (out.file) {
        out.file->close();
        if (!*out.file) throw Error(ErrorCode::IoError, "failed writing " + cfg.output);
    }
    if (!cfg.regions_out.empty()) write_text_file(cfg.regions_out, regions_to_json(first.regions).dump(2) + "\n");
}

// ---------------------------------------------------------------------------

BenchConfig bench_config_from_json(const json& j) {
    reject_unknown(j, {"methods", "width", "height", "frames", "runs", "threads"}, "bench config");
    BenchConfig cfg;
    try {
        if (j.contains("width")) cfg.width = get_as<int>(j, "width");
        if (j.contains("height")) cfg.height = get_as<int>(j, "height");
        if (j.contains("frames")) cfg.frames = get_as<int>(j, "frames");
        if (j.contains("runs")) cfg.runs = get_as<int>(j, "runs");
        if (j.contains("threads")) cfg.threads = get_as<int>(j, "threads");
    } catch (const json::exception& e) {
        config_error(e.what());
    }
    if (j.contains("methods")) {
        if (!j.at("methods").is_array()) config_error("'methods' must be an array");
        for (const auto& e : j.at("methods")) {
            if (e.is_object()) {
                for (const auto& [key, v] : e.items()) {
                    if (key != "gains" && (v.is_array() || v.is_object())) {
                        config_error("bench method '" + key + "' takes a single value");
                    }
                }
            }
            SweepSpec spec;
            sweep_method_entry(e, spec);
            cfg.methods.push_back({spec.method, spec.base});
        }
    }
    return cfg;
}

double percentile(std::vector<double> samples, double q) {
    if (samples.empty()) throw Error(ErrorCode::InvalidParameter, "no samples");
    std::sort(samples.begin(), samples.end());
    const auto n = samples.size();
    auto rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(n)));
    rank = std::clamp<std::size_t>(rank, 1, n);
    return samples[rank - 1];
}

json cmd_bench(const BenchConfig& in) {
    BenchConfig cfg = in;
    if (cfg.runs < 1) config_error("runs must be >= 1");
    if (cfg.frames < 1) config_error("frames must be >= 1");
    if (cfg.threads < 0) config_error("threads must be >= 0");
    if (cfg.methods.empty()) {
        MethodParams haar;
        haar.basis = BasisId::Haar;
        cfg.methods = {{Method::Wtaa, haar}, {Method::Gaussian, {}}, {Method::Downsample, {}}, {Method::Superpixel, {}}};
    }
    if (cfg.threads > 0) set_kernel_threads(cfg.threads);

    std::vector<Frame> frames;
    for (int i = 0; i < cfg.frames; ++i) {
        SceneParams p;
        p.width = cfg.width;
        p.height = cfg.height;
        p.noise = 0.05;
        p.seed = static_cast<std::uint64_t>(i) + 1;
        frames.push_back(make_near_far_scene(p).frame);
    }

    json methods = json::array();
    for (const auto& bm : cfg.methods) {
        const Anonymizer anon = make_anonymizer(bm.method, bm.params);
        std::vector<double> samples;
        for (int run = 0; run < cfg.runs; ++run) {
            const auto t0 = std::chrono::steady_clock::now();
            for (const auto& f : frames) {
                const Frame out = anon(f, Exec::Parallel);
                if (out.size() != f.size()) throw Error(ErrorCode::DimMismatch, "anonymizer changed the frame size");
            }
            const std::chrono::duration<double, std::milli> dt = std::chrono::steady_clock::now() - t0;
            samples.push_back(dt.count() / cfg.frames);
        }
        methods.push_back({{"method", to_string(bm.method)},
                           {"params", params_to_json(bm.method, bm.params)},
                           {"samples_ms", samples},
                           {"median_ms", percentile(samples, 0.5)},
                           {"p95_ms", percentile(samples, 0.95)}});
    }
    return {{"width", cfg.width},
            {"height", cfg.height},
            {"frames", cfg.frames},
            {"runs", cfg.runs},
            {"threads", cfg.threads > 0 ? cfg.threads : kernel_threads()},
            {"methods", std::move(methods)}};
}

// ---------------------------------------------------------------------------

json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::ConfigError, "cannot open " + path);
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw Error(ErrorCode::ConfigError, path + ": " + e.what());
    }
}

void write_text_file(const std::string& path, const std::string& text) {
    if (path == "-") {
        std::cout << text << std::flush;
        return;
    }
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoError, "cannot create " + path);
    out << text;
    out.close();
    if (!out) throw Error(ErrorCode::IoError, "failed writing " + path);
}

std::vector<Frame> read_all_frames(const std::string& path, StreamFormat format) {
    Input in = open_input(path, format);
    std::vector<Frame> frames;
    while (auto f = in.source->next()) frames.push_back(std::move(*f));
    return frames;
}

}  // namespace wavescrub
