// natext: endpoint solving, domains, bijectivity and entropy reports for the alpha-maps of G_n.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include "natext/csv.hpp"
#include "natext/natext.hpp"

using namespace natext;

namespace {

struct usage_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct Config {
    int n = 3;
    int k = 0;
    std::vector<std::string> v;
    std::string alpha;
    std::string alphas;
    int precision = 64;
    long samples = 100000;
    int grid = 512;
    std::uint64_t seed = 1;
    bool sweep = false;
    bool verify = false;
    bool expansive = false;
    std::string out;
    std::string format;
    int jobs = 1;
    int max_iter = 400;
    double mass_tol = 1e-10;
};

class Sink {
public:
    explicit Sink(const std::string& path)
    {
        if (!path.empty()) {
            file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
            if (!*file_) throw std::runtime_error("cannot open '" + path + "' for writing");
        }
    }
    std::ostream& os() { return file_ ? *file_ : std::cout; }

private:
    std::unique_ptr<std::ofstream> file_;
};

Word word_arg(const std::string& text)
{
    try {
        return parse_word(text);
    } catch (const invalid_word& e) {
        throw usage_error(std::string("--v: ") + e.what());
    }
}

// "zeta:k,v", "eta:k,v", "delta:k,v" or a number
template <class Real>
struct AlphaArg {
    Real value{0};
    std::optional<SyncInterval<Real>> interval;
};

template <class Real>
AlphaArg<Real> alpha_arg(const GroupParams<Real>& g, const std::string& text)
{
    AlphaArg<Real> a;
    auto colon = text.find(':');
    if (colon == std::string::npos) {
        try {
            a.value = parse_real<Real>(text);
        } catch (const std::exception&) {
            throw usage_error("--alpha: '" + text + "' is neither a number nor zeta:k,v / eta:k,v / delta:k,v");
        }
        if (!(a.value > 0 && a.value < 1)) throw usage_error("--alpha must lie in (0,1)");
        return a;
    }
    std::string which = text.substr(0, colon), rest = text.substr(colon + 1);
    auto comma = rest.find(',');
    if (comma == std::string::npos) throw usage_error("--alpha: expected " + which + ":k,v");
    int k;
    try {
        k = std::stoi(rest.substr(0, comma));
    } catch (const std::exception&) {
        throw usage_error("--alpha: k must be an integer");
    }
    if (k == 0) throw usage_error("--alpha: k must be nonzero");
    Word v = word_arg(rest.substr(comma + 1));
    auto I = solve_and_certify(g, k, v);
    if (which == "zeta") a.value = I.zeta;
    else if (which == "eta") a.value = I.eta;
    else if (which == "delta") {
        if (!I.delta) throw usage_error("--alpha: delta exists only for k < 0");
        a.value = *I.delta;
    } else throw usage_error("--alpha: unknown endpoint '" + which + "'");
    a.interval = I;
    return a;
}

template <class Real>
Domain<Real> domain_for(const GroupParams<Real>& g, const AlphaArg<Real>& a, const Config& c, bool allow_sweep)
{
    if (a.interval) return build_closed_form(g, *a.interval, a.value);
    AutoOptions<Real> o;
    o.allow_sweep = allow_sweep;
    o.sweep.max_iter = c.max_iter;
    o.sweep.mass_tol = Real(c.mass_tol);
    return build_auto(g, a.value, o);
}

template <class Real>
int cmd_sync(const Config& c)
{
    auto g = group_params<Real>(c.n);
    std::vector<Word> words;
    for (const auto& text : c.v) words.push_back(word_arg(text));
    Sink sink(c.out);
    auto& os = sink.os();
    csv_row(os, {"n", "k", "v", "zeta", "eta", "delta", "S_under", "S_bar", "e", "upper_word", "lower_word", "valid", "note", "seed"});
    auto row = [&](const SyncInterval<Real>& I) {
        csv_row(os, {std::to_string(c.n), std::to_string(I.k), format_word(I.v.letters), to_string(I.zeta), to_string(I.eta),
                     I.delta ? to_string(*I.delta) : "", std::to_string(I.Sunder), std::to_string(I.Sbar), std::to_string(I.e),
                     format_digit_word(I.upper_word), format_digit_word(I.lower_word), I.valid ? "true" : "false", I.note,
                     std::to_string(c.seed)});
    };
    if (!c.alpha.empty() && c.v.empty()) {
        auto a = alpha_arg(g, c.alpha);
        auto I = a.interval ? a.interval : locate(g, a.value);
        if (!I) throw std::runtime_error("no certified matching interval found for alpha=" + c.alpha);
        row(*I);
        return 0;
    }
    if (c.k == 0 || c.v.empty()) throw usage_error("sync needs --k and --v (or --alpha)");
    for (const auto& v : words) {
        try {
            row(solve_and_certify(g, c.k, v));
        } catch (const invalid_candidate& e) {
            SyncInterval<Real> I;
            I.k = c.k;
            I.v = v;
            I.note = e.what();
            row(I);
        }
    }
    return 0;
}

template <class Real>
int cmd_domain(const Config& c)
{
    if (c.alpha.empty()) throw usage_error("domain needs --alpha");
    auto g = group_params<Real>(c.n);
    auto a = alpha_arg(g, c.alpha);
    Domain<Real> D;
    try {
        D = domain_for(g, a, c, c.sweep);
    } catch (const unresolved_alpha& e) {
        throw std::runtime_error(std::string(e.what()) + " (pass --sweep to build an approximate domain)");
    }
    Sink sink(c.out);
    auto& os = sink.os();
    std::string fmt = c.format.empty() ? "json-record" : c.format;
    std::optional<BijectivityReport<Real>> rep;
    if (c.verify) {
        auto s = make_spec(g, a.value);
        auto B = partition_blocks(D, s);
        BijectivityOptions<Real> opt;
        opt.jobs = c.jobs;
        rep = verify_bijectivity(D, B, s, c.samples, c.grid, c.seed, opt);
    }
    if (fmt == "json-record") {
        auto j = domain_to_json(D);
        j["mass"] = to_string(mu_domain(D).mass);
        j["seed"] = c.seed;
        if (rep) {
            j["bijectivity"] = {{"containment_fraction", to_string(rep->containment_fraction)},
                                {"mass_balance_residual", to_string(rep->mass_balance_residual)},
                                {"grid_multiplicity_excess", to_string(rep->grid_multiplicity_excess)},
                                {"samples", rep->samples},
                                {"grid", rep->grid},
                                {"verdict", verdict_name(rep->verdict)}};
        }
        os << j.dump(2) << "\n";
    } else if (fmt == "svg") {
        os << domain_to_svg(D);
        if (rep) std::cerr << report_to_keyvalue(*rep);
    } else if (fmt == "csv") {
        csv_row(os, {"part", "x1", "x2", "y1", "y2", "mass", "tag"});
        for (const auto& r : D.upper)
            csv_row(os, {"upper", to_string(r.x1), to_string(r.x2), to_string(r.y1), to_string(r.y2), to_string(mu_rect(r)), r.tag});
        for (const auto& r : D.lower)
            csv_row(os, {"lower", to_string(r.x1), to_string(r.x2), to_string(r.y1), to_string(r.y2), to_string(mu_rect(r)), r.tag});
        if (rep) std::cerr << report_to_keyvalue(*rep);
    } else if (fmt == "keyvalue") {
        os << "n=" << D.n << "\nalpha=" << to_string(D.alpha) << "\nkind=" << kind_name(D.kind) << "\nrectangles=" << D.size() << "\n";
        if (!rep) os << "mass=" << to_string(mu_domain(D).mass) << "\n";
        if (rep) os << report_to_keyvalue(*rep);
    } else {
        throw usage_error("--format must be csv, json-record, svg or keyvalue");
    }
    if (rep && rep->verdict != Verdict::pass) return 3;
    return 0;
}

const std::vector<std::string> entropy_header{"n", "alpha", "kind", "mass", "rohlin_integral", "entropy", "product",
                                              "residual_vs_vol", "quad_error", "residual_mass", "seed"};
const std::vector<std::string> expansive_header{"r", "mass_F", "induced_integral", "abramov_residual"};

template <class Real>
std::vector<std::string> entropy_fields(const ConjectureReport<Real>& r, const Config& c)
{
    return {std::to_string(r.n), to_string(r.alpha), kind_name(r.kind), to_string(r.mass), to_string(r.integral),
            to_string(r.entropy), to_string(r.entropy * r.mass), to_string(r.residual), to_string(r.quad_error),
            to_string(r.residual_mass), std::to_string(c.seed)};
}

template <class Real>
std::vector<std::string> expansive_fields(const GroupParams<Real>& g, const Domain<Real>& D)
{
    auto s = make_spec(g, D.alpha);
    try {
        auto P = expansivity_power(s);
        if (!P.conclusive) return {"", "", "", ""};
        auto F = induced_domain(D, s, P);
        auto a = abramov_check(D, F, s, P);
        return {std::to_string(a.r), to_string(a.mass_F), to_string(a.induced_integral), to_string(a.residual)};
    } catch (const std::exception&) {
        return {"", "", "", ""};
    }
}

template <class Real>
int cmd_entropy(const Config& c)
{
    if (c.alpha.empty()) throw usage_error("entropy needs --alpha");
    auto g = group_params<Real>(c.n);
    auto a = alpha_arg(g, c.alpha);
    auto D = domain_for(g, a, c, true);
    auto r = conjecture_report(g, D);
    Sink sink(c.out);
    auto h = entropy_header;
    auto f = entropy_fields(r, c);
    if (c.expansive) {
        h.insert(h.end(), expansive_header.begin(), expansive_header.end());
        auto e = expansive_fields(g, D);
        f.insert(f.end(), e.begin(), e.end());
    }
    csv_row(sink.os(), h);
    csv_row(sink.os(), f);
    return 0;
}

template <class Real>
int cmd_scan(const Config& c)
{
    if (c.alphas.empty()) throw usage_error("scan needs --alphas start:end:count");
    std::vector<Real> grid;
    try {
        grid = parse_grid<Real>(c.alphas);
    } catch (const std::exception& e) {
        throw usage_error(std::string("--alphas: ") + e.what());
    }
    AutoOptions<Real> o;
    o.sweep.max_iter = c.max_iter;
    o.sweep.mass_tol = Real(c.mass_tol);
    auto rows = scan<Real>(c.n, grid, c.jobs, o);
    Sink sink(c.out);
    auto h = entropy_header;
    h.push_back("error");
    csv_row(sink.os(), h);
    for (const auto& row : rows) {
        if (row.ok) {
            auto f = entropy_fields(row.report, c);
            f.push_back("");
            csv_row(sink.os(), f);
        } else {
            std::vector<std::string> f(h.size());
            f[0] = std::to_string(c.n);
            f[1] = to_string(row.report.alpha);
            f[h.size() - 2] = std::to_string(c.seed);
            f.back() = row.error;
            csv_row(sink.os(), f);
        }
    }
    return 0;
}

template <class Real>
int cmd_conjecture(const Config& c)
{
    if (c.alpha.empty()) throw usage_error("conjecture needs --alpha");
    auto g = group_params<Real>(c.n);
    auto a = alpha_arg(g, c.alpha);
    auto D = domain_for(g, a, c, true);
    auto r = conjecture_report(g, D);
    Sink sink(c.out);
    csv_row(sink.os(), {"n", "alpha", "kind", "integral", "vol_n", "residual", "quad_error", "residual_mass", "seed"});
    csv_row(sink.os(), {std::to_string(r.n), to_string(r.alpha), kind_name(r.kind), to_string(r.integral), to_string(r.vol),
                        to_string(r.residual), to_string(r.quad_error), to_string(r.residual_mass), std::to_string(c.seed)});
    return 0;
}

template <class Real>
int dispatch(const std::string& cmd, const Config& c)
{
    if (cmd == "sync") return cmd_sync<Real>(c);
    if (cmd == "domain") return cmd_domain<Real>(c);
    if (cmd == "entropy") return cmd_entropy<Real>(c);
    if (cmd == "scan") return cmd_scan<Real>(c);
    return cmd_conjecture<Real>(c);
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"natext: natural extensions of alpha-maps for the Hecke-type groups G_n"};
    app.require_subcommand(1, 1);
    Config c;

    auto common = [&](CLI::App* s) {
        s->add_option("--n", c.n, "group index n >= 3")->check(CLI::Range(3, 1000));
        s->add_option("--precision", c.precision, "working precision in bits (64 or 128)")->check(CLI::IsMember({64, 128}));
        s->add_option("--seed", c.seed, "random seed, recorded in every output");
        s->add_option("--out", c.out, "output path (default stdout)");
        s->add_option("--jobs", c.jobs, "worker count")->check(CLI::PositiveNumber);
    };

    auto* sync = app.add_subcommand("sync", "solve and certify matching interval endpoints");
    common(sync);
    sync->add_option("--k", c.k, "level: k >= 1 small regime, k <= -1 large regime");
    sync->add_option("--v", c.v, "word c1 d1 ... cs (space or comma separated); may repeat");
    sync->add_option("--alpha", c.alpha, "locate the interval containing alpha instead");

    auto* dom = app.add_subcommand("domain", "build the planar domain");
    common(dom);
    dom->add_option("--alpha", c.alpha, "alpha in (0,1) or zeta:k,v / eta:k,v / delta:k,v")->required();
    dom->add_flag("--sweep", c.sweep, "allow the approximate sweep when alpha is not in a certified interval");
    dom->add_flag("--verify", c.verify, "run the bijectivity certification");
    dom->add_option("--samples", c.samples, "samples for the containment test")->check(CLI::PositiveNumber);
    dom->add_option("--grid", c.grid, "raster size for the multiplicity test")->check(CLI::Range(8, 8192));
    dom->add_option("--format", c.format, "csv, json-record, svg or keyvalue")
        ->check(CLI::IsMember({"csv", "json-record", "svg", "keyvalue"}));
    dom->add_option("--max-iter", c.max_iter, "sweep iteration cap")->check(CLI::PositiveNumber);
    dom->add_option("--mass-tol", c.mass_tol, "sweep stopping tolerance")->check(CLI::PositiveNumber);

    auto* ent = app.add_subcommand("entropy", "Rohlin integral, mass and entropy at one alpha");
    common(ent);
    ent->add_option("--alpha", c.alpha, "alpha in (0,1) or zeta:k,v / eta:k,v / delta:k,v")->required();
    ent->add_flag("--expansive", c.expansive, "append expansive power and Abramov columns");
    ent->add_option("--format", c.format, "csv")->check(CLI::IsMember({"csv"}));

    auto* scn = app.add_subcommand("scan", "entropy table over an alpha grid");
    common(scn);
    scn->add_option("--alphas", c.alphas, "start:end:count")->required();
    scn->add_option("--format", c.format, "csv")->check(CLI::IsMember({"csv"}));
    scn->add_option("--max-iter", c.max_iter, "sweep iteration cap")->check(CLI::PositiveNumber);
    scn->add_option("--mass-tol", c.mass_tol, "sweep stopping tolerance")->check(CLI::PositiveNumber);

    auto* con = app.add_subcommand("conjecture", "residual of the entropy-mass product against vol_n");
    common(con);
    con->add_option("--alpha", c.alpha, "alpha in (0,1) or zeta:k,v / eta:k,v / delta:k,v")->required();
    con->add_option("--format", c.format, "csv")->check(CLI::IsMember({"csv"}));

    CLI11_PARSE(app, argc, argv);
    std::string cmd = app.get_subcommands().front()->get_name();
    try {
        return c.precision == 128 ? dispatch<quad>(cmd, c) : dispatch<double>(cmd, c);
    } catch (const usage_error& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
