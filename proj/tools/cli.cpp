#include "cli.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "axmul/compressor.hpp"
#include "axmul/io.hpp"
#include "axmul/metrics.hpp"
#include "axmul/multiplier.hpp"
#include "axmul/netlist.hpp"
#include "axmul/nn/bundle.hpp"
#include "axmul/nn/idx.hpp"
#include "axmul/nn/image.hpp"

namespace axmul::cli {

namespace {

/// Flag combination the parser cannot express on its own.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::uint64_t fnv1a(std::string_view bytes, std::uint64_t h = 0xcbf29ce484222325ull) {
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

/// Accumulates everything that determines a command's outputs.
struct ConfigHash {
    std::uint64_t h = fnv1a("");
    void add(std::string_view part) {
        h = fnv1a(part, h);
        h = fnv1a(std::string_view("\x1f", 1), h);
    }
    void add_file(const std::string& path) { add(read_file(path)); }
    std::string hex() const { return fmt::format("{:016x}", h); }
};

struct Run {
    explicit Run(std::string cmd) : command(std::move(cmd)) {}

    std::string command;
    ConfigHash hash;
    std::optional<std::uint64_t> seed;
    std::vector<std::string> outputs;

    void write(const std::string& path, std::string_view bytes) {
        write_file_atomic(path, bytes);
        outputs.push_back(path);
    }

    /// One manifest per output, each listing the full output set.
    void write_manifests() const {
        nlohmann::ordered_json j;
        j["command"] = command;
        j["config_hash"] = hash.hex();
        j["seed"] = seed ? nlohmann::ordered_json(*seed) : nlohmann::ordered_json(nullptr);
        j["outputs"] = outputs;
        j["tool_version"] = kToolVersion;
        const std::string text = j.dump(2) + "\n";
        for (const auto& path : outputs) write_file_atomic(path + ".manifest.json", text);
    }
};

std::string table_label(const std::string& path) {
    std::string stem = std::filesystem::path(path).stem().string();
    std::replace(stem.begin(), stem.end(), ',', '_');
    return stem.empty() ? "csv" : stem;
}

// ---------------------------------------------------------------- compressor

struct DumpOptions {
    std::string design;
    std::string out;
};

void compressor_dump(const DumpOptions& o, std::ostream& out) {
    Run run{"compressor dump"};
    run.hash.add(o.design);

    std::string csv;
    std::vector<std::string> notes;
    if (o.design == "exact") {
        csv = "x4,x3,x2,x1,cout,carry,sum\n";
        for (unsigned p = 0; p < CompressorTruthTable::kRows; ++p) {
            const auto r = exact_compressor(CompressorInputs::from_index(p));
            csv += fmt::format("{},{},{},{},{},{},{}\n", (p >> 3) & 1, (p >> 2) & 1, (p >> 1) & 1, p & 1,
                               int(r.cout), int(r.carry), int(r.sum));
        }
        notes.push_back("design=exact");
        notes.push_back("error_rows=0");
        notes.push_back("error_probability=0/256");
        const CriticalPath cp = critical_path(exact_compressor_netlist());
        notes.push_back(fmt::format("critical_path stages={} output={}", cp.stages, cp.output));
        std::string gates;
        for (GateKind g : cp.gates) gates += (gates.empty() ? "" : " ") + std::string(to_string(g));
        notes.push_back("critical_path gates=" + gates);
    } else {
        CompressorTruthTable table;
        bool netlist = false;
        if (o.design == "proposed") {
            table = proposed_truth_table();
            netlist = true;
        } else if (o.design.rfind("pattern:", 0) == 0) {
            table = table_from_error_pattern(parse_error_pattern(o.design.substr(8)));
        } else {
            throw UsageError("unknown design '" + o.design + "' (expected proposed, exact or pattern:<spec>)");
        }
        csv = table.to_csv();
        notes.push_back("design=" + o.design);
        notes.push_back(fmt::format("error_rows={}", table.error_combinations()));
        for (unsigned p = 0; p < CompressorTruthTable::kRows; ++p) {
            if (!table.is_error(p)) continue;
            notes.push_back(fmt::format("error x4x3x2x1={}{}{}{} carry={} sum={} difference={} probability={}/256",
                                        (p >> 3) & 1, (p >> 2) & 1, (p >> 1) & 1, p & 1, int(table[p].carry),
                                        int(table[p].sum), table.value_error(p),
                                        CompressorTruthTable::occurrence_weight(p)));
        }
        notes.push_back(fmt::format("error_probability={}/256", table.error_weight()));
        if (netlist) {
            const GateNetlist n = proposed_netlist();
            for (unsigned p = 0; p < CompressorTruthTable::kRows; ++p) {
                const auto r = simulate_netlist(n, p);
                if (r.carry != table[p].carry || r.sum != table[p].sum)
                    throw std::logic_error("netlist disagrees with truth table");
            }
            const CriticalPath cp = critical_path(n);
            notes.push_back(fmt::format("critical_path stages={} output={}", cp.stages, cp.output));
            std::string gates;
            for (GateKind g : cp.gates) gates += (gates.empty() ? "" : " ") + std::string(to_string(g));
            notes.push_back("critical_path gates=" + gates);
        }
    }

    if (o.out.empty()) {
        out << csv;
    } else {
        run.write(o.out, csv);
        run.write_manifests();
    }
    for (const auto& n : notes) out << "# " << n << '\n';
}

// ---------------------------------------------------------------- mult

struct FamilyOptions {
    std::string family;
    std::string table;
    std::optional<int> threshold;
    std::optional<int> trunc;
    unsigned threads = 0;
};

MultiplierConfig make_config(const FamilyOptions& o, ConfigHash& hash) {
    const Family family = [&] {
        try {
            return parse_family(o.family);
        } catch (const ValidationError& e) {
            throw UsageError(e.what());
        }
    }();
    if (o.threshold && family != Family::Design1Hybrid) throw UsageError("--threshold requires --family design1");
    if (o.trunc && family != Family::Design2Truncated) throw UsageError("--trunc requires --family design2");
    if (!o.table.empty() && family == Family::Exact) throw UsageError("--table has no effect with --family exact");

    CompressorTruthTable table = proposed_truth_table();
    if (!o.table.empty()) table = CompressorTruthTable::from_csv(read_file(o.table), table_label(o.table));

    MultiplierConfig cfg;
    switch (family) {
        case Family::Exact: cfg = MultiplierConfig::exact(); break;
        case Family::ProposedFullApprox: cfg = MultiplierConfig::proposed(table); break;
        case Family::Design1Hybrid: cfg = MultiplierConfig::design1(table, o.threshold.value_or(8)); break;
        case Family::Design2Truncated: cfg = MultiplierConfig::design2(table, o.trunc.value_or(4)); break;
    }
    hash.add(cfg.describe());
    hash.add(cfg.approx_table.to_csv());
    return cfg;
}

struct SweepOptions : FamilyOptions {
    std::string out;
    std::string plan;
    std::string histogram;
    bool pretty = false;
};

void mult_sweep(const SweepOptions& o, std::ostream& out) {
    Run run{"mult sweep"};
    const MultiplierConfig cfg = make_config(o, run.hash);
    const ReductionPlan plan = build_plan(cfg);
    const ErrorReport report = exhaustive_sweep(cfg, o.threads);

    const std::string csv = report_csv_header() + report_csv_row(report);
    if (o.pretty) {
        out << report_table(std::span<const ErrorReport>(&report, 1));
    } else {
        out << csv;
    }
    out << fmt::format("# stages={} approx_42={} exact_42={} full_adder={} half_adder={}\n", plan.stages.size(),
                       plan.count(Reducer::Approx42), plan.count(Reducer::Exact42), plan.count(Reducer::FullAdder),
                       plan.count(Reducer::HalfAdder));
    if (cfg.family == Family::Design2Truncated)
        out << fmt::format("# truncation_width={} compensation={}\n", cfg.truncation_width, cfg.compensation);
    out << fmt::format("# cases={} errors={} red_cases={} zero_exact_nonzero_approx={}\n", report.n_cases,
                       report.n_errors, report.n_red_cases, report.zero_exact_nonzero_approx);

    if (!o.out.empty()) run.write(o.out, csv);
    if (!o.plan.empty()) run.write(o.plan, plan.dump());
    if (!o.histogram.empty()) run.write(o.histogram, histogram_csv(report));
    if (!run.outputs.empty()) run.write_manifests();
}

struct LutOptions : FamilyOptions {
    std::string out;
};

void mult_lut(const LutOptions& o, std::ostream& out) {
    Run run{"mult lut"};
    const MultiplierConfig cfg = make_config(o, run.hash);
    const ProductLut lut = build_product_lut(cfg, o.threads);
    write_lut(lut, o.out);
    run.outputs.push_back(o.out);
    run.write_manifests();
    out << fmt::format("{} entries={} fnv1a={:016x}\n", cfg.describe(), lut.size(), fnv1a(read_file(o.out)));
}

// ---------------------------------------------------------------- nn

struct InferOptions {
    std::string bundle, images, labels, lut, out;
    std::size_t limit = 0;
    unsigned threads = 0;
};

void nn_infer(const InferOptions& o, std::ostream& out) {
    Run run{"nn infer"};
    for (const auto* p : {&o.bundle, &o.images, &o.labels, &o.lut}) run.hash.add_file(*p);
    run.hash.add(std::to_string(o.limit));

    const nn::WeightBundle bundle = nn::load_bundle(o.bundle);
    const nn::IdxImages images = nn::read_idx_images(o.images);
    const std::vector<std::uint8_t> labels = nn::read_idx_labels(o.labels);
    const ProductLut lut = read_lut(o.lut);
    if (labels.size() != images.count)
        throw nn::IdxError(fmt::format("{} images but {} labels", images.count, labels.size()));
    if (nn::element_count(bundle.input_shape) != images.rows * images.cols)
        throw nn::ContractError(fmt::format("bundle expects {} pixels per image, IDX has {}x{}",
                                            nn::element_count(bundle.input_shape), images.rows, images.cols));
    const std::size_t total = o.limit ? std::min(o.limit, images.count) : images.count;
    const unsigned threads = resolve_threads(o.threads);

    std::size_t correct = 0;
    for (std::size_t i = 0; i < total; ++i) {
        const nn::QuantizedTensor x = nn::quantize_pixels(bundle, images.image(i));
        if (nn::classify(bundle, x, lut, threads) == labels[i]) ++correct;
    }
    const double percent = total ? 100.0 * double(correct) / double(total) : 0.0;
    const std::string csv = fmt::format("total,correct,percent\n{},{},{:.3f}\n", total, correct, percent);
    out << csv;
    if (!o.out.empty()) {
        run.write(o.out, csv);
        run.write_manifests();
    }
}

struct DenoiseOptions {
    std::string bundle, image, lut, out, noisy_out, metrics_out;
    int sigma = 25;
    std::uint64_t seed = 42;
    unsigned threads = 0;
};

void nn_denoise(const DenoiseOptions& o, std::ostream& out) {
    Run run{"nn denoise"};
    for (const auto* p : {&o.bundle, &o.image, &o.lut}) run.hash.add_file(*p);
    run.hash.add(std::to_string(o.sigma));
    run.seed = o.seed;

    const nn::WeightBundle bundle = nn::load_bundle(o.bundle);
    const nn::GrayImage clean = nn::read_pgm(o.image);
    const ProductLut lut = read_lut(o.lut);
    const nn::GrayImage noisy = nn::add_gaussian_noise(clean, o.sigma, o.seed);
    const nn::GrayImage restored = nn::denoise(bundle, noisy, lut, resolve_threads(o.threads));

    const nn::ImagePair before{clean, noisy};
    const nn::ImagePair after{clean, restored};
    const std::string csv = fmt::format("image,sigma,psnr,ssim\nnoisy,{},{:.4f},{:.4f}\ndenoised,{},{:.4f},{:.4f}\n",
                                        o.sigma, nn::psnr(before), nn::ssim(before), o.sigma, nn::psnr(after),
                                        nn::ssim(after));
    out << csv;
    run.write(o.out, nn::encode_pgm(restored));
    if (!o.noisy_out.empty()) run.write(o.noisy_out, nn::encode_pgm(noisy));
    if (!o.metrics_out.empty()) run.write(o.metrics_out, csv);
    run.write_manifests();
}

// ---------------------------------------------------------------- report

struct ReportRow {
    std::string design;
    std::vector<std::string> values;  // er, nmed, mred, max_ed, mean_ed as written
};

std::vector<ReportRow> read_report(const std::string& path) {
    std::istringstream in(read_file(path));
    std::string line;
    std::vector<ReportRow> rows;
    bool header = false;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        if (!header) {
            if (line + "\n" != report_csv_header()) throw ValidationError(path + ": not an error-report CSV");
            header = true;
            continue;
        }
        std::vector<std::string> fields;
        std::stringstream ss(line);
        for (std::string f; std::getline(ss, f, ',');) fields.push_back(f);
        if (fields.size() != 6) throw ValidationError(fmt::format("{}:{}: expected 6 fields", path, line_no));
        for (std::size_t i = 1; i < fields.size(); ++i) {
            std::size_t used = 0;
            double v = 0;
            try {
                v = std::stod(fields[i], &used);
            } catch (const std::exception&) {
                used = 0;
            }
            if (used != fields[i].size() || !std::isfinite(v))
                throw ValidationError(fmt::format("{}:{}: bad number '{}'", path, line_no, fields[i]));
        }
        rows.push_back({fields[0], {fields.begin() + 1, fields.end()}});
    }
    if (!header) throw ValidationError(path + ": empty report");
    return rows;
}

struct CompareOptions {
    std::vector<std::string> inputs;
    std::string out;
    std::string long_out;
};

void report_compare(const CompareOptions& o, std::ostream& out) {
    Run run{"report compare"};
    std::vector<ReportRow> rows;
    for (const auto& path : o.inputs) {
        run.hash.add_file(path);
        for (auto& r : read_report(path)) rows.push_back(std::move(r));
    }

    std::size_t width = 6;
    for (const auto& r : rows) width = std::max(width, r.design.size());
    out << fmt::format("{:<{}}  {:>8}  {:>8}  {:>8}  {:>8}  {:>12}\n", "Design", width, "ER (%)", "NMED (%)",
                       "MRED (%)", "max ED", "mean ED");
    for (const auto& r : rows) {
        out << fmt::format("{:<{}}  {:>8}  {:>8}  {:>8}  {:>8}  {:>12}\n", r.design, width, r.values[0], r.values[1],
                           r.values[2], r.values[3], r.values[4]);
    }

    if (!o.out.empty()) {
        std::string csv = report_csv_header();
        for (const auto& r : rows) {
            csv += r.design;
            for (const auto& v : r.values) csv += "," + v;
            csv += '\n';
        }
        run.write(o.out, csv);
    }
    if (!o.long_out.empty()) {
        static const char* const kMetrics[] = {"er", "nmed", "mred", "max_ed", "mean_ed"};
        std::string csv = "design,metric,value\n";
        for (const auto& r : rows) {
            for (std::size_t i = 0; i < r.values.size(); ++i) csv += fmt::format("{},{},{}\n", r.design, kMetrics[i], r.values[i]);
        }
        run.write(o.long_out, csv);
    }
    if (!run.outputs.empty()) run.write_manifests();
}

// ---------------------------------------------------------------- wiring

void add_family_flags(CLI::App* cmd, FamilyOptions& o) {
    cmd->add_option("--family", o.family, "exact, design1, design2 or proposed")->required();
    cmd->add_option("--table", o.table, "approximate compressor truth table (CSV)")->check(CLI::ExistingFile);
    cmd->add_option("--threshold", o.threshold, "design1: first column using exact 4:2 cells");
    cmd->add_option("--trunc", o.trunc, "design2: truncated low columns");
    cmd->add_option("--threads", o.threads, "worker threads (default: AXMUL_THREADS or all cores)");
}

const CLI::App* deepest_parsed(const CLI::App& app) {
    const CLI::App* cur = &app;
    for (auto subs = cur->get_subcommands(); !subs.empty(); subs = cur->get_subcommands()) cur = subs.front();
    return cur;
}

std::string error_kind(const std::exception& e) {
    if (dynamic_cast<const ValidationError*>(&e)) return "validation";
    if (dynamic_cast<const StructuralError*>(&e)) return "structural";
    if (dynamic_cast<const DomainError*>(&e)) return "domain";
    if (dynamic_cast<const nn::BundleError*>(&e)) return "bundle";
    if (dynamic_cast<const nn::ImageError*>(&e)) return "image";
    if (dynamic_cast<const nn::IdxError*>(&e)) return "idx";
    if (dynamic_cast<const nn::ContractError*>(&e)) return "contract";
    if (dynamic_cast<const std::logic_error*>(&e)) return "internal";
    return "runtime";
}

std::string one_line(std::string s) {
    std::replace(s.begin(), s.end(), '\n', ' ');
    return s;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Approximate 4:2 compressor multiplier analysis"};
    app.set_version_flag("--version", kToolVersion);
    app.require_subcommand(1);

    DumpOptions dump;
    SweepOptions sweep;
    LutOptions lut;
    InferOptions infer;
    DenoiseOptions den;
    CompareOptions cmp;

    auto* compressor = app.add_subcommand("compressor", "compressor truth tables")->require_subcommand(1);
    auto* dump_cmd = compressor->add_subcommand("dump", "truth table CSV and critical path");
    dump_cmd->add_option("--design", dump.design, "proposed, exact or pattern:<spec>")->required();
    dump_cmd->add_option("--out", dump.out, "CSV path (default: stdout)");

    auto* mult = app.add_subcommand("mult", "8x8 multiplier simulation")->require_subcommand(1);
    auto* sweep_cmd = mult->add_subcommand("sweep", "exhaustive error report");
    add_family_flags(sweep_cmd, sweep);
    sweep_cmd->add_option("--out", sweep.out, "report CSV");
    sweep_cmd->add_option("--plan", sweep.plan, "reduction plan dump");
    sweep_cmd->add_option("--histogram", sweep.histogram, "error-distance histogram CSV");
    sweep_cmd->add_flag("--pretty", sweep.pretty, "print a text table instead of CSV");
    auto* lut_cmd = mult->add_subcommand("lut", "binary product lookup table");
    add_family_flags(lut_cmd, lut);
    lut_cmd->add_option("--out", lut.out, "LUT path")->required();

    auto* nn_cmd = app.add_subcommand("nn", "quantized inference")->require_subcommand(1);
    auto* infer_cmd = nn_cmd->add_subcommand("infer", "classification accuracy");
    infer_cmd->add_option("--bundle", infer.bundle)->required()->check(CLI::ExistingFile);
    infer_cmd->add_option("--images", infer.images)->required()->check(CLI::ExistingFile);
    infer_cmd->add_option("--labels", infer.labels)->required()->check(CLI::ExistingFile);
    infer_cmd->add_option("--lut", infer.lut)->required()->check(CLI::ExistingFile);
    infer_cmd->add_option("--limit", infer.limit, "first N images only (0 = all)");
    infer_cmd->add_option("--out", infer.out, "accuracy CSV");
    infer_cmd->add_option("--threads", infer.threads);
    auto* den_cmd = nn_cmd->add_subcommand("denoise", "denoise a noised PGM");
    den_cmd->add_option("--bundle", den.bundle)->required()->check(CLI::ExistingFile);
    den_cmd->add_option("--image", den.image, "clean reference PGM")->required()->check(CLI::ExistingFile);
    den_cmd->add_option("--sigma", den.sigma)->required()->check(CLI::IsMember({25, 50}));
    den_cmd->add_option("--lut", den.lut)->required()->check(CLI::ExistingFile);
    den_cmd->add_option("--seed", den.seed, "noise seed")->capture_default_str();
    den_cmd->add_option("--out", den.out, "denoised PGM")->required();
    den_cmd->add_option("--noisy-out", den.noisy_out, "noisy PGM");
    den_cmd->add_option("--metrics-out", den.metrics_out, "PSNR/SSIM CSV");
    den_cmd->add_option("--threads", den.threads);

    auto* report = app.add_subcommand("report", "report post-processing")->require_subcommand(1);
    auto* cmp_cmd = report->add_subcommand("compare", "merge error-report CSVs");
    cmp_cmd->add_option("--inputs", cmp.inputs)->required()->check(CLI::ExistingFile);
    cmp_cmd->add_option("--out", cmp.out, "merged CSV");
    cmp_cmd->add_option("--long", cmp.long_out, "long-format design,metric,value CSV");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << deepest_parsed(app)->help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::CallForVersion&) {
        out << kToolVersion << '\n';
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: usage: " << one_line(e.what()) << '\n';
        return 2;
    }

    try {
        if (*dump_cmd) compressor_dump(dump, out);
        else if (*sweep_cmd) mult_sweep(sweep, out);
        else if (*lut_cmd) mult_lut(lut, out);
        else if (*infer_cmd) nn_infer(infer, out);
        else if (*den_cmd) nn_denoise(den, out);
        else if (*cmp_cmd) report_compare(cmp, out);
    } catch (const UsageError& e) {
        err << "error: usage: " << one_line(e.what()) << '\n';
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << error_kind(e) << ": " << one_line(e.what()) << '\n';
        return 1;
    }
    return 0;
}

}  // namespace axmul::cli
