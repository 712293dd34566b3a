// gazeqc: data-quality reports for EyeLink ASC recordings.
//
// Exit codes: 0 success, 1 parse/input error, 2 invalid stimulus or
// configuration, 3 strict mode with warnings.

#include <atomic>
#include <exception>
#include <filesystem>
#include <fnmatch.h>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "gazeqc/asc_parser.hpp"
#include "gazeqc/report.hpp"
#include "gazeqc/stimulus.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitParseError = 1;
constexpr int kExitConfigError = 2;
constexpr int kExitStrictWarnings = 3;

struct CommonOptions {
    std::string trial_start = "TRIALID";
    std::string trial_end = "TRIAL_RESULT";
    double dispersion_px = 25.0;
    double min_fix_ms = 50.0;
    std::string stimulus_path;
    std::string stimulus_map_path;
    std::string format = "json";
    std::string out_path;
    bool strict = false;
};

void add_common_flags(CLI::App* cmd, CommonOptions& opt) {
    cmd->add_option("--trial-start", opt.trial_start, "Trial start message prefix")
        ->capture_default_str();
    cmd->add_option("--trial-end", opt.trial_end, "Trial end message prefix")
        ->capture_default_str();
    cmd->add_option("--dispersion-px", opt.dispersion_px,
                    "Dispersion threshold for fallback fixation detection")
        ->capture_default_str();
    cmd->add_option("--min-fix-ms", opt.min_fix_ms,
                    "Minimum fixation duration for fallback detection")
        ->capture_default_str();
    cmd->add_option("--stimulus", opt.stimulus_path, "AOI layout CSV applied to every trial");
    cmd->add_option("--stimulus-map", opt.stimulus_map_path,
                    "CSV binding trials to AOI layouts (trial_id,stimulus_id,aoi_path)");
    cmd->add_option("--format", opt.format, "Report format: json or markdown")
        ->capture_default_str();
    cmd->add_option("--out", opt.out_path, "Write the report here instead of standard output");
    cmd->add_flag("--strict", opt.strict, "Exit 3 when the report contains any warning");
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw gazeqc::Error("cannot read '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return std::move(buf).str();
}

void write_output(const std::string& out_path, const std::string& content) {
    if (out_path.empty()) {
        std::cout << content;
        return;
    }
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw gazeqc::Error("cannot write '" + out_path + "'");
    out << content;
}

// Rows: trial_id,stimulus_id,aoi_path. Relative AOI paths are resolved
// against the map file's directory.
std::map<std::string, gazeqc::StimulusLayout> load_stimulus_map(const std::string& map_path) {
    std::map<std::string, gazeqc::StimulusLayout> out;
    std::map<std::string, gazeqc::StimulusLayout> cache;
    std::ifstream in(map_path);
    if (!in) throw gazeqc::Error("cannot read '" + map_path + "'");
    const fs::path base = fs::path(map_path).parent_path();

    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line_no == 1 && line == "trial_id,stimulus_id,aoi_path") continue;
        std::size_t c1 = line.find(',');
        std::size_t c2 = c1 == std::string::npos ? std::string::npos : line.find(',', c1 + 1);
        if (c2 == std::string::npos)
            throw gazeqc::Error("stimulus map row " + std::to_string(line_no) +
                                ": expected trial_id,stimulus_id,aoi_path");
        std::string trial_id = line.substr(0, c1);
        std::string stimulus_id = line.substr(c1 + 1, c2 - c1 - 1);
        fs::path aoi_path = line.substr(c2 + 1);
        if (aoi_path.is_relative()) aoi_path = base / aoi_path;

        auto key = aoi_path.generic_string();
        auto it = cache.find(key);
        if (it == cache.end())
            it = cache.emplace(key, gazeqc::load_aoi_csv(read_file(key), stimulus_id)).first;
        gazeqc::StimulusLayout layout = it->second;
        layout.stimulus_id = stimulus_id;
        out[trial_id] = std::move(layout);
    }
    return out;
}

gazeqc::SessionConfig make_config(const CommonOptions& opt) {
    gazeqc::SessionConfig config;
    config.trial_start_prefix = opt.trial_start;
    config.trial_end_prefix = opt.trial_end;
    config.idt = {opt.dispersion_px, opt.min_fix_ms};
    if (!config.idt.valid())
        throw gazeqc::Error("detection parameters must be positive");
    if (!opt.stimulus_path.empty()) {
        config.stimulus_for_all =
            gazeqc::load_aoi_csv(read_file(opt.stimulus_path),
                                 fs::path(opt.stimulus_path).stem().string());
        config.stimulus_path = opt.stimulus_path;
    }
    if (!opt.stimulus_map_path.empty()) {
        config.stimulus_by_trial = load_stimulus_map(opt.stimulus_map_path);
        config.stimulus_map_path = opt.stimulus_map_path;
    }
    return config;
}

int run_report(const std::string& input, const CommonOptions& opt) {
    gazeqc::ReportFormat format = gazeqc::parse_report_format(opt.format);
    gazeqc::SessionConfig config = make_config(opt);

    std::string text;
    try {
        text = read_file(input);
    } catch (const std::exception& e) {
        std::cerr << "gazeqc: " << e.what() << "\n";
        return kExitParseError;
    }
    gazeqc::SessionQualityReport report;
    try {
        report = gazeqc::build_session_report_from_text(text, config, input);
    } catch (const gazeqc::ParseError& e) {
        std::cerr << "gazeqc: parse error in '" << input << "': " << e.what() << "\n";
        return kExitParseError;
    }
    write_output(opt.out_path, gazeqc::serialize_report(report, format));
    if (opt.strict && report.total_warning_count() > 0) {
        std::cerr << "gazeqc: strict mode: " << report.total_warning_count()
                  << " warning(s) in '" << input << "'\n";
        return kExitStrictWarnings;
    }
    return kExitOk;
}

std::vector<std::string> collect_inputs(const std::vector<std::string>& inputs,
                                        const std::string& glob) {
    std::vector<std::string> files;
    for (const std::string& input : inputs) {
        fs::path p(input);
        if (fs::is_directory(p)) {
            for (const auto& entry : fs::directory_iterator(p)) {
                if (!entry.is_regular_file()) continue;
                const std::string name = entry.path().filename().string();
                if (fnmatch(glob.c_str(), name.c_str(), 0) == 0)
                    files.push_back(entry.path().generic_string());
            }
        } else if (fs::is_regular_file(p)) {
            files.push_back(p.generic_string());
        } else {
            throw gazeqc::Error("cannot read '" + input + "'");
        }
    }
    // Output must not depend on filesystem enumeration order.
    std::sort(files.begin(), files.end());
    files.erase(std::unique(files.begin(), files.end()), files.end());
    return files;
}

int run_dataset(const std::vector<std::string>& inputs, const std::string& glob, int jobs,
                const CommonOptions& opt) {
    gazeqc::ReportFormat format = gazeqc::parse_report_format(opt.format);
    gazeqc::SessionConfig config = make_config(opt);

    std::vector<std::string> files;
    try {
        files = collect_inputs(inputs, glob);
    } catch (const std::exception& e) {
        std::cerr << "gazeqc: " << e.what() << "\n";
        return kExitParseError;
    }
    if (files.empty()) {
        std::cerr << "gazeqc: no input files matched\n";
        return kExitParseError;
    }

    std::vector<gazeqc::SessionQualityReport> sessions(files.size());
    std::vector<std::exception_ptr> errors(files.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (std::size_t i = next.fetch_add(1); i < files.size(); i = next.fetch_add(1)) {
            try {
                sessions[i] =
                    gazeqc::build_session_report_from_text(read_file(files[i]), config, files[i]);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const int n_threads = std::max(1, jobs);
    std::vector<std::thread> pool;
    for (int i = 1; i < n_threads; ++i) pool.emplace_back(worker);
    worker();
    for (std::thread& t : pool) t.join();

    for (std::size_t i = 0; i < files.size(); ++i) {
        if (!errors[i]) continue;
        try {
            std::rethrow_exception(errors[i]);
        } catch (const std::exception& e) {
            std::cerr << "gazeqc: parse error in '" << files[i] << "': " << e.what() << "\n";
        }
        return kExitParseError;
    }

    gazeqc::DatasetQualityReport dataset = gazeqc::aggregate_dataset(sessions);
    write_output(opt.out_path, gazeqc::serialize_report(dataset, format));

    if (opt.strict) {
        std::size_t warnings = 0;
        for (const auto& s : sessions) warnings += s.total_warning_count();
        if (warnings > 0) {
            std::cerr << "gazeqc: strict mode: " << warnings << " warning(s) across "
                      << files.size() << " session(s)\n";
            return kExitStrictWarnings;
        }
    }
    return kExitOk;
}

int run_validate_aoi(const std::string& input) {
    std::string text;
    try {
        text = read_file(input);
    } catch (const std::exception& e) {
        std::cerr << "gazeqc: " << e.what() << "\n";
        return kExitParseError;
    }
    try {
        gazeqc::StimulusLayout layout = gazeqc::load_aoi_csv(text, fs::path(input).stem().string());
        std::cout << "ok: " << layout.words.size() << " words on " << layout.line_count
                  << " line(s)\n";
        return kExitOk;
    } catch (const gazeqc::AoiError& e) {
        std::cerr << "gazeqc: invalid AOI layout '" << input << "': " << e.what() << "\n";
        return kExitConfigError;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Data-quality reports for EyeLink ASC eye-tracking recordings"};
    app.require_subcommand(1);

    std::string report_input;
    CommonOptions report_opt;
    CLI::App* report_cmd = app.add_subcommand("report", "Quality report for one session");
    report_cmd->add_option("input", report_input, "ASC file")->required();
    add_common_flags(report_cmd, report_opt);

    std::vector<std::string> dataset_inputs;
    std::string dataset_glob = "*.asc";
    int dataset_jobs = 1;
    CommonOptions dataset_opt;
    CLI::App* dataset_cmd =
        app.add_subcommand("dataset", "Aggregate quality report across sessions");
    dataset_cmd->add_option("inputs", dataset_inputs, "ASC files or directories")->required();
    dataset_cmd->add_option("--glob", dataset_glob, "Filename pattern for directory inputs")
        ->capture_default_str();
    dataset_cmd->add_option("--jobs", dataset_jobs, "Parallel session workers")
        ->capture_default_str();
    add_common_flags(dataset_cmd, dataset_opt);

    std::string aoi_input;
    CLI::App* validate_cmd = app.add_subcommand("validate-aoi", "Lint an AOI layout CSV");
    validate_cmd->add_option("input", aoi_input, "AOI CSV file")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (report_cmd->parsed()) return run_report(report_input, report_opt);
        if (dataset_cmd->parsed()) return run_dataset(dataset_inputs, dataset_glob, dataset_jobs,
                                                      dataset_opt);
        if (validate_cmd->parsed()) return run_validate_aoi(aoi_input);
    } catch (const gazeqc::AoiError& e) {
        std::cerr << "gazeqc: invalid stimulus: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const gazeqc::ReportError& e) {
        std::cerr << "gazeqc: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const std::exception& e) {
        std::cerr << "gazeqc: " << e.what() << "\n";
        return kExitConfigError;
    }
    return kExitOk;
}
