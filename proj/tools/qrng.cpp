// qrng: analytic sweeps, optimum search, simulated generation and
// randomness testing for two-detector beam-splitter random number generators.
//
// Exit codes: 0 success, 1 validation error, 2 runtime/numeric error, 3 I/O error.

#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <iterator>
#include <optional>
#include <sstream>
#include <string>
#include <type_traits>
#include <vector>

#include "qrng/analysis.hpp"
#include "qrng/battery.hpp"
#include "qrng/config.hpp"
#include "qrng/errors.hpp"
#include "qrng/pipeline.hpp"

namespace {

using qrng::config::KeyValueConfig;

template <class T>
T parse_value(const std::string& key, const std::string& text) {
    if constexpr (std::is_same_v<T, bool>) {
        if (text == "1" || text == "true" || text == "yes" || text == "on") return true;
        if (text == "0" || text == "false" || text == "no" || text == "off") return false;
        throw qrng::DomainError("config key '" + key + "': expected a boolean, got '" + text + "'");
    } else if constexpr (std::is_same_v<T, std::string>) {
        return text;
    } else if constexpr (std::is_same_v<T, std::vector<std::string>>) {
        return {text};
    } else {
        std::istringstream in(text);
        T value{};
        if (!(in >> value) || !(in >> std::ws).eof()) {
            throw qrng::DomainError("config key '" + key + "': cannot parse '" + text + "'");
        }
        return value;
    }
}

/// Binds option values with flag > config file > default precedence.
class Settings {
  public:
    explicit Settings(CLI::App* app) : app_(app) {}

    template <class T>
    CLI::Option* add(const std::string& key, T& target, const std::string& help) {
        auto* opt = app_->add_option("--" + key, target, help)->capture_default_str();
        bindings_.push_back([this, opt, key, &target] {
            if (opt->count() == 0) {
                if (auto v = config_->get(key)) target = parse_value<T>(key, *v);
            }
        });
        return opt;
    }

    CLI::Option* flag(const std::string& key, bool& target, const std::string& help) {
        auto* opt = app_->add_flag("--" + key, target, help);
        bindings_.push_back([this, opt, key, &target] {
            if (opt->count() == 0) {
                if (auto v = config_->get(key)) target = parse_value<bool>(key, *v);
            }
        });
        return opt;
    }

    bool given(const std::string& key) const {
        return app_->get_option("--" + key)->count() > 0 || config_->get(key).has_value();
    }

    void apply(const KeyValueConfig& cfg) {
        config_ = &cfg;
        for (auto& b : bindings_) b();
    }

  private:
    CLI::App* app_;
    const KeyValueConfig* config_ = nullptr;
    std::vector<std::function<void()>> bindings_;
};

std::vector<qrng::fock::SourceModel> parse_sources(const std::vector<std::string>& names) {
    std::vector<qrng::fock::SourceModel> out;
    for (const auto& item : names) {
        std::stringstream ss(item);
        std::string name;
        while (std::getline(ss, name, ',')) {
            if (!name.empty()) out.push_back(qrng::fock::SourceModel::parse(name));
        }
    }
    return out;
}

void emit(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        std::cout.flush();
        return;
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw qrng::IoError("cannot open '" + path + "' for writing");
    out << text;
    if (!out) throw qrng::IoError("error while writing '" + path + "'");
}

std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw qrng::IoError("cannot open '" + path + "' for reading");
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void check_format(const std::string& format) {
    if (format != "csv" && format != "text") {
        throw qrng::DomainError("--format must be csv or text, got '" + format + "'");
    }
}

struct SweepArgs {
    double mu_eta = 0.0;
    double min = 0.05;
    double max = 20.0;
    unsigned points = 60;
    std::string spacing = "log";
    std::vector<std::string> sources{"single", "indist"};
    double eta0 = 1.0;
    double eta1 = 1.0;
    std::string format = "csv";
    std::string out = "-";
};

void run_sweep(const SweepArgs& a, const Settings& s) {
    check_format(a.format);
    qrng::analysis::SweepSpec spec;
    spec.sources = parse_sources(a.sources);
    spec.detectors = {a.eta0, a.eta1};
    if (a.spacing == "log") {
        spec.spacing = qrng::analysis::Spacing::Logarithmic;
    } else if (a.spacing == "linear") {
        spec.spacing = qrng::analysis::Spacing::Linear;
    } else {
        throw qrng::DomainError("--spacing must be log or linear");
    }
    std::vector<qrng::analysis::SweepRow> rows;
    if (s.given("mu-eta")) {
        if (!(a.mu_eta > 0.0)) throw qrng::DomainError("--mu-eta must be positive");
        spec.detectors.validate();
        for (const auto& src : spec.sources) {
            src.validate();
            rows.push_back(qrng::analysis::evaluate_row(src, a.mu_eta, spec.detectors));
        }
    } else {
        spec.mu_eta_min = a.min;
        spec.mu_eta_max = a.max;
        spec.points = a.points;
        rows = qrng::analysis::sweep(spec);
    }
    emit(a.out, a.format == "csv" ? qrng::analysis::sweep_to_csv(rows) : qrng::analysis::sweep_to_text(rows));
}

struct OptimumArgs {
    std::vector<std::string> sources{"single", "indist"};
    double lo = 0.05;
    double hi = 20.0;
    double tolerance = 1e-4;
    std::string format = "csv";
    std::string out = "-";
};

void run_optimum(const OptimumArgs& a) {
    check_format(a.format);
    qrng::analysis::OptimumOptions opt;
    opt.tolerance = a.tolerance;
    std::ostringstream os;
    os << std::setprecision(9);
    if (a.format == "csv") os << "source,mu_eta,p_gen\n";
    std::optional<double> single, indist;
    for (const auto& src : parse_sources(a.sources)) {
        const auto best = qrng::analysis::find_optimum(src, a.lo, a.hi, opt);
        if (src == qrng::fock::SourceModel::single()) single = best.p_gen;
        if (src == qrng::fock::SourceModel::indistinguishable()) indist = best.p_gen;
        if (a.format == "csv") {
            os << src.name() << ',' << best.mu_eta << ',' << best.p_gen << '\n';
        } else {
            os << src.name() << ": p_gen*=" << best.p_gen << " at mu_eta*=" << best.mu_eta << '\n';
        }
    }
    if (single && indist) {
        os << (a.format == "csv" ? "# improvement_ratio=" : "improvement ratio indist/single: ") << *indist / *single
           << '\n';
    }
    emit(a.out, os.str());
}

struct GenerateArgs {
    std::string source = "indist";
    double mu = 0.0;
    double mu_eta = 2.1;
    double eta0 = 1.0;
    double eta1 = 1.0;
    std::uint64_t gates = 1'000'000;
    std::uint64_t bits = 0;
    std::uint64_t seed = 1;
    double gate_rate = 100e3;
    bool debias = false;
    std::string out = "bits.qrng";
    std::string ascii;
    std::string events;
    std::string summary = "-";
    std::string format = "text";
};

void run_generate(const GenerateArgs& a, const Settings& s) {
    check_format(a.format);
    if (s.given("gates") && s.given("bits")) throw qrng::DomainError("--gates and --bits are mutually exclusive");
    if (s.given("mu") && s.given("mu-eta")) throw qrng::DomainError("--mu and --mu-eta are mutually exclusive");
    qrng::pipeline::GenerateOptions opt;
    opt.sim.source = qrng::fock::SourceModel::parse(a.source);
    opt.sim.detectors = {a.eta0, a.eta1};
    opt.sim.detectors.validate();
    if (s.given("mu")) {
        opt.sim.mu = a.mu;
    } else {
        // mu*eta refers to the mean channel efficiency.
        const double eta = 0.5 * (a.eta0 + a.eta1);
        if (!(eta > 0.0)) throw qrng::DomainError("--mu-eta needs a non-zero detector efficiency");
        opt.sim.mu = a.mu_eta / eta;
    }
    opt.sim.seed = a.seed;
    opt.sim.n_gates = a.gates;
    opt.sim.gate_rate = a.gate_rate;
    if (s.given("bits")) opt.target_bits = a.bits;
    opt.debias = a.debias;
    opt.out = a.out;
    opt.ascii_out = a.ascii;
    opt.events_out = a.events;
    const auto result = qrng::pipeline::generate(opt);
    emit(a.summary, a.format == "csv" ? result.summary.to_csv() : result.summary.to_text());
}

struct TestArgs {
    std::string input;
    std::size_t block_size = 1'000'000;
    double alpha = 0.01;
    unsigned workers = 1;
    std::string format = "text";
    std::string out = "-";
};

void run_test(const TestArgs& a) {
    check_format(a.format);
    qrng::randtests::BatteryConfig cfg;
    cfg.block_size = a.block_size;
    cfg.significance = a.alpha;
    cfg.workers = a.workers;
    const auto report = qrng::pipeline::test_file(a.input, cfg);
    emit(a.out, a.format == "csv" ? report.to_csv() : report.to_text());
}

struct ReportArgs {
    std::string input;
    std::string format = "text";
    std::string out = "-";
};

/// Re-renders a stored battery report or sweep table.
void run_report(const ReportArgs& a) {
    check_format(a.format);
    const std::string text = read_text(a.input);
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line) && (line.empty() || line[0] == '#')) {
    }
    if (line.starts_with("mu_eta,")) {
        const auto rows = qrng::analysis::sweep_from_csv(text);
        emit(a.out, a.format == "csv" ? qrng::analysis::sweep_to_csv(rows) : qrng::analysis::sweep_to_text(rows));
        return;
    }
    const auto report = qrng::randtests::TestReport::from_csv(text);
    emit(a.out, a.format == "csv" ? report.to_csv() : report.to_text());
}

int exit_code(qrng::ErrorKind kind) {
    switch (kind) {
        case qrng::ErrorKind::Validation: return 1;
        case qrng::ErrorKind::Numeric: return 2;
        case qrng::ErrorKind::Io: return 3;
    }
    return 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Beam-splitter QRNG simulation and analysis"};
    app.require_subcommand(1);
    std::string config_path;
    app.add_option("--config", config_path, "key=value configuration file (default: $QRNG_CONFIG)");

    SweepArgs sweep_args;
    auto* sweep = app.add_subcommand("sweep", "Analytic P_gen / P_disc / contrast over a mu*eta grid");
    Settings sweep_set(sweep);
    sweep_set.add("mu-eta", sweep_args.mu_eta, "Evaluate a single mu*eta instead of a grid");
    sweep_set.add("min", sweep_args.min, "Smallest mu*eta");
    sweep_set.add("max", sweep_args.max, "Largest mu*eta");
    sweep_set.add("points", sweep_args.points, "Grid points");
    sweep_set.add("spacing", sweep_args.spacing, "log or linear");
    sweep_set.add("source", sweep_args.sources, "single|indist|dist|mix:<overlap>, repeatable or comma-separated");
    sweep_set.add("eta0", sweep_args.eta0, "Bit-0 detector efficiency");
    sweep_set.add("eta1", sweep_args.eta1, "Bit-1 detector efficiency");
    sweep_set.add("format", sweep_args.format, "csv or text");
    sweep_set.add("out", sweep_args.out, "Output path, - for stdout");

    OptimumArgs opt_args;
    auto* optimum = app.add_subcommand("optimum", "Operating point maximising P_gen");
    Settings opt_set(optimum);
    opt_set.add("source", opt_args.sources, "Source models to optimise");
    opt_set.add("lo", opt_args.lo, "Lower end of the mu*eta bracket");
    opt_set.add("hi", opt_args.hi, "Upper end of the mu*eta bracket");
    opt_set.add("tolerance", opt_args.tolerance, "mu*eta tolerance of the search");
    opt_set.add("format", opt_args.format, "csv or text");
    opt_set.add("out", opt_args.out, "Output path, - for stdout");

    GenerateArgs gen_args;
    auto* generate = app.add_subcommand("generate", "Simulate the generator and write a bit file");
    Settings gen_set(generate);
    gen_set.add("source", gen_args.source, "single|indist|dist|mix:<overlap>");
    gen_set.add("mu", gen_args.mu, "Mean total photons per gate at the splitter input");
    gen_set.add("mu-eta", gen_args.mu_eta, "mu times the mean detector efficiency (alternative to --mu)");
    gen_set.add("eta0", gen_args.eta0, "Bit-0 detector efficiency");
    gen_set.add("eta1", gen_args.eta1, "Bit-1 detector efficiency");
    gen_set.add("gates", gen_args.gates, "Number of gates to simulate");
    gen_set.add("bits", gen_args.bits, "Run until this many output bits exist (instead of --gates)");
    gen_set.add("seed", gen_args.seed, "Simulation seed");
    gen_set.add("gate-rate", gen_args.gate_rate, "Gate frequency in Hz, for throughput");
    gen_set.flag("debias", gen_args.debias, "Apply von Neumann debiasing");
    gen_set.add("out", gen_args.out, "Binary bit file");
    gen_set.add("ascii", gen_args.ascii, "Also write an ASCII '0'/'1' file");
    gen_set.add("events", gen_args.events, "Also write the per-gate event byte stream");
    gen_set.add("summary", gen_args.summary, "Summary output path, - for stdout");
    gen_set.add("format", gen_args.format, "Summary format: csv or text");

    TestArgs test_args;
    auto* test = app.add_subcommand("test", "Run the randomness battery on a bit file");
    Settings test_set(test);
    test->add_option("input", test_args.input, "Bit file (binary or ASCII)")->required();
    test_set.add("block-size", test_args.block_size, "Bits per block");
    test_set.add("alpha", test_args.alpha, "Significance level");
    test_set.add("workers", test_args.workers, "Blocks evaluated in parallel");
    test_set.add("format", test_args.format, "csv or text");
    test_set.add("out", test_args.out, "Report path, - for stdout");

    ReportArgs report_args;
    auto* report = app.add_subcommand("report", "Re-render a stored battery report or sweep CSV");
    Settings report_set(report);
    report->add_option("input", report_args.input, "Stored CSV")->required();
    report_set.add("format", report_args.format, "csv or text");
    report_set.add("out", report_args.out, "Output path, - for stdout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        const auto cfg = KeyValueConfig::resolve(config_path);
        if (*sweep) {
            sweep_set.apply(cfg);
            run_sweep(sweep_args, sweep_set);
        } else if (*optimum) {
            opt_set.apply(cfg);
            run_optimum(opt_args);
        } else if (*generate) {
            gen_set.apply(cfg);
            run_generate(gen_args, gen_set);
        } else if (*test) {
            test_set.apply(cfg);
            run_test(test_args);
        } else if (*report) {
            report_set.apply(cfg);
            run_report(report_args);
        }
    } catch (const qrng::Error& e) {
        std::cerr << "qrng: error: " << e.what() << '\n';
        return exit_code(e.kind());
    } catch (const std::exception& e) {
        std::cerr << "qrng: error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
