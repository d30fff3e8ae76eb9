// wavescrub command line: anonymize | compare | synth | bench.

#include <algorithm>
#include <cstdlib>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "wavescrub/app.hpp"

using nlohmann::json;
using namespace wavescrub;

namespace {

const std::set<std::string> kStringKeys = {"input",  "output", "format",       "method",       "basis",
                                           "color_mode", "report", "regions", "dump_pyramid", "match_region"};

double parse_number(const std::string& key, const std::string& text) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != text.size()) {
        throw Error(ErrorCode::ConfigError, "--" + key + ": '" + text + "' is not a number");
    }
    return v;
}

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, sep)) out.push_back(item);
    return out;
}

json scalar(const std::string& key, const std::string& text) {
    if (kStringKeys.count(key)) return text;
    const double v = parse_number(key, text);
    if (v == static_cast<double>(static_cast<long long>(v)) && text.find_first_of(".eE") == std::string::npos) {
        return static_cast<long long>(v);
    }
    return v;
}

/// "1,2,4" is a list, "from:to:step" a range, anything else a scalar.
json sweepable(const std::string& key, const std::string& text) {
    if (kStringKeys.count(key)) return text;
    if (text.find(',') != std::string::npos) {
        json list = json::array();
        for (const auto& item : split(text, ',')) list.push_back(parse_number(key, item));
        return list;
    }
    if (text.find(':') != std::string::npos) {
        const auto parts = split(text, ':');
        if (parts.size() < 2 || parts.size() > 3) {
            throw Error(ErrorCode::ConfigError, "--" + key + ": ranges are from:to[:step]");
        }
        json range = {{"from", parse_number(key, parts[0])}, {"to", parse_number(key, parts[1])}};
        if (parts.size() == 3) range["step"] = parse_number(key, parts[2]);
        return range;
    }
    return scalar(key, text);
}

/// String-valued options keyed by their config JSON name.
class Flags {
public:
    explicit Flags(CLI::App* app) : app_(app) {}

    void add(const std::string& flag, const std::string& key, const std::string& help) {
        options_[key] = app_->add_option(flag, values_[key], help);
    }

    bool given(const std::string& key) const {
        auto it = options_.find(key);
        return it != options_.end() && it->second->count() > 0;
    }
    const std::string& value(const std::string& key) const { return values_.at(key); }

    std::vector<std::string> given_keys() const {
        std::vector<std::string> out;
        for (const auto& [key, opt] : options_) {
            if (opt->count() > 0) out.push_back(key);
        }
        return out;
    }

private:
    CLI::App* app_;
    std::map<std::string, std::string> values_;
    std::map<std::string, CLI::Option*> options_;
};

void add_method_params(Flags& f) {
    f.add("--basis", "basis", "wtaa basis: haar, db4, cdf97");
    f.add("--levels", "levels", "wtaa decomposition levels");
    f.add("--destroy-finest", "destroy_finest", "wtaa: number of finest levels destroyed (fractions attenuate)");
    f.add("--color-mode", "color_mode", "wtaa: per-channel or luma-chroma");
    f.add("--sigma", "sigma", "gaussian standard deviation in pixels");
    f.add("--factor", "factor", "downsample block size");
    f.add("--segments", "segments", "superpixel count");
    f.add("--compactness", "compactness", "superpixel compactness");
}

const std::vector<std::string> kParamKeys = {"basis", "levels",      "destroy_finest", "color_mode", "gains",
                                             "approx_gain", "sigma", "factor", "segments", "compactness"};

bool is_param(const std::string& key) {
    return std::find(kParamKeys.begin(), kParamKeys.end(), key) != kParamKeys.end();
}

json base_config(const Flags& f) {
    if (f.given("config")) return load_json_file(f.value("config"));
    return json::object();
}

int run_anonymize(const Flags& f) {
    json j = base_config(f);
    for (const auto& key : f.given_keys()) {
        if (key != "config") j[key] = scalar(key, f.value(key));
    }
    // A method switch on the command line drops parameters of the old method
    // that came from the config file.
    if (f.given("method") && j.is_object()) {
        const Method m = parse_method(f.value("method"));
        for (const auto& key : kParamKeys) {
            const auto& own = method_keys(m);
            if (!f.given(key) && j.contains(key) && std::find(own.begin(), own.end(), key) == own.end()) j.erase(key);
        }
    }
    const RunConfig cfg = run_config_from_json(j);
    const AnonymizeSummary s = cmd_anonymize(cfg);
    std::cerr << "wavescrub: anonymized " << s.frames << " frame(s) with " << to_string(cfg.method) << "\n";
    return 0;
}

int run_compare(const Flags& f) {
    json j = base_config(f);
    for (const auto& key : f.given_keys()) {
        if (key == "config" || key == "method" || is_param(key)) continue;
        j[key] = scalar(key, f.value(key));
    }
    if (f.given("method")) {
        json methods = json::array();
        for (const auto& name : split(f.value("method"), ',')) {
            const Method m = parse_method(name);
            json entry = {{"method", name}};
            for (const auto& key : method_keys(m)) {
                if (f.given(key)) entry[key] = sweepable(key, f.value(key));
            }
            methods.push_back(entry);
        }
        j["methods"] = methods;
        for (const auto& key : kParamKeys) {
            if (!f.given(key)) continue;
            bool used = false;
            for (const auto& name : split(f.value("method"), ',')) {
                const auto& own = method_keys(parse_method(name));
                used = used || std::find(own.begin(), own.end(), key) != own.end();
            }
            if (!used) throw Error(ErrorCode::ConfigError, "--" + key + " applies to none of the listed methods");
        }
    } else {
        for (const auto& key : kParamKeys) {
            if (f.given(key)) throw Error(ErrorCode::ConfigError, "parameter flags need --method in compare");
        }
    }
    if (!j.contains("report")) j["report"] = "-";
    cmd_compare(compare_config_from_json(j));
    return 0;
}

int run_synth(const Flags& f) {
    json j = base_config(f);
    for (const auto& key : f.given_keys()) {
        if (key != "config") j[key] = scalar(key, f.value(key));
    }
    cmd_synth(synth_config_from_json(j));
    return 0;
}

int run_bench(const Flags& f) {
    json j = base_config(f);
    std::string report = "-";
    for (const auto& key : f.given_keys()) {
        if (key == "config" || key == "method" || is_param(key)) continue;
        if (key == "report") report = f.value(key);
        else j[key] = scalar(key, f.value(key));
    }
    if (f.given("method")) {
        json methods = json::array();
        for (const auto& name : split(f.value("method"), ',')) {
            const Method m = parse_method(name);
            json entry = {{"method", name}};
            for (const auto& key : method_keys(m)) {
                if (f.given(key)) entry[key] = scalar(key, f.value(key));
            }
            if (m == Method::Wtaa && !entry.contains("basis")) entry["basis"] = "haar";
            methods.push_back(entry);
        }
        j["methods"] = methods;
    }
    const json out = cmd_bench(bench_config_from_json(j));
    write_text_file(report, out.dump(2) + "\n");
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"wavescrub: wavelet-based anonymization of images and video"};
    app.require_subcommand(1);

    auto* anonymize = app.add_subcommand("anonymize", "anonymize a PPM sequence or Y4M stream");
    Flags anon_flags(anonymize);
    anon_flags.add("--input", "input", "input file, PPM directory or - for stdin");
    anon_flags.add("--output", "output", "output file (.y4m, .ppm), directory or - for stdout");
    anon_flags.add("--format", "format", "input format: auto, ppm-seq, y4m");
    anon_flags.add("--method", "method", "wtaa, gaussian, downsample or superpixel");
    add_method_params(anon_flags);
    anon_flags.add("--regions", "regions", "regions JSON used by the report");
    anon_flags.add("--report", "report", "write a metrics report JSON here");
    anon_flags.add("--threads", "threads", "frame workers");
    anon_flags.add("--config", "config", "config JSON; flags override its values");
    anon_flags.add("--dump-pyramid", "dump_pyramid", "write the first frame's coefficient pyramid (wtaa)");

    auto* compare = app.add_subcommand("compare", "sweep methods and report matched-anonymity metrics");
    Flags cmp_flags(compare);
    cmp_flags.add("--input", "input", "input file or directory; omit for the synthetic scene");
    cmp_flags.add("--format", "format", "input format: auto, ppm-seq, y4m");
    cmp_flags.add("--method", "method", "comma-separated methods, e.g. wtaa,gaussian");
    add_method_params(cmp_flags);
    cmp_flags.add("--regions", "regions", "regions JSON");
    cmp_flags.add("--report", "report", "report path (default stdout)");
    cmp_flags.add("--threads", "threads", "kernel threads");
    cmp_flags.add("--config", "config", "compare config JSON");
    cmp_flags.add("--match-region", "match_region", "region whose PSNR is matched (default near_figure)");
    cmp_flags.add("--target-psnr", "target_psnr_db", "matched PSNR target in dB (default 20)");
    cmp_flags.add("--tolerance", "tolerance_db", "accepted distance from the target in dB (default 1)");

    auto* synth = app.add_subcommand("synth", "generate the near/far test scene");
    Flags syn_flags(synth);
    syn_flags.add("--output", "output", "output file, directory or - for stdout");
    syn_flags.add("--format", "format", "ppm-seq or y4m");
    syn_flags.add("--regions", "regions", "write the scene's regions JSON here");
    syn_flags.add("--width", "width", "frame width (even, >= 128)");
    syn_flags.add("--height", "height", "frame height (even, >= 128)");
    syn_flags.add("--frames", "frames", "number of frames");
    syn_flags.add("--seed", "seed", "noise seed");
    syn_flags.add("--noise", "noise", "uniform noise amplitude");
    syn_flags.add("--stripe-amplitude", "stripe_amplitude", "luma amplitude of the figure stripes");
    syn_flags.add("--config", "config", "synth config JSON");

    auto* bench = app.add_subcommand("bench", "time each method over generated frames");
    Flags bench_flags(bench);
    bench_flags.add("--method", "method", "comma-separated methods (default: all four)");
    add_method_params(bench_flags);
    bench_flags.add("--width", "width", "frame width");
    bench_flags.add("--height", "height", "frame height");
    bench_flags.add("--frames", "frames", "frames per run");
    bench_flags.add("--runs", "runs", "timed runs per method");
    bench_flags.add("--threads", "threads", "kernel threads");
    bench_flags.add("--report", "report", "timing JSON path (default stdout)");
    bench_flags.add("--config", "config", "bench config JSON");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitUsage;
    }

    try {
        if (anonymize->parsed()) return run_anonymize(anon_flags);
        if (compare->parsed()) return run_compare(cmp_flags);
        if (synth->parsed()) return run_synth(syn_flags);
        if (bench->parsed()) return run_bench(bench_flags);
    } catch (const Error& e) {
        std::cerr << "wavescrub: " << e.what() << "\n";
        return exit_code_for(e);
    } catch (const std::exception& e) {
        std::cerr << "wavescrub: " << e.what() << "\n";
        return kExitProcessing;
    }
    return kExitUsage;
}
