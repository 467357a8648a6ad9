// lpspec: batch front end for the l^p spectral solvers.
//
// Tensors are read from JSON files {"dims": [...], "values": [...]} with
// values in row-major order (last index fastest). Results are written to
// stdout as a JSON report, or as a plain table with --format text.
//
// Exit codes: 0 success, 2 input error, 3 non-convergence, 4 precondition
// violation.

#include <lpspec/lpspec.hpp>

#include <CLI11.hpp>
#include <json.hpp>
#include <openssl/evp.h>

#include <charconv>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

using json = nlohmann::ordered_json;
using namespace lpspec;

constexpr int exit_ok = 0;
constexpr int exit_input = 2;
constexpr int exit_not_converged = 3;
constexpr int exit_precondition = 4;

/// Errors caught before any numerical work starts.
struct InputError : std::runtime_error
{
    using std::runtime_error::runtime_error;
};

struct LoadedTensor
{
    DenseTensor tensor;
    std::string digest;
};

std::string sha256_hex(const std::string& bytes)
{
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr);
    static const char* hex = "0123456789abcdef";
    std::string out = "sha256:";
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[md[i] >> 4];
        out += hex[md[i] & 0xf];
    }
    return out;
}

LoadedTensor load_tensor(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw InputError("cannot open tensor file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    const std::string bytes = ss.str();
    json doc;
    try {
        doc = json::parse(bytes);
    } catch (const json::parse_error& e) {
        throw InputError("tensor file '" + path + "' is not valid JSON: " + e.what());
    }
    if (!doc.is_object() || !doc.contains("dims") || !doc.contains("values"))
        throw InputError("tensor file must be an object with \"dims\" and \"values\"");
    std::vector<std::size_t> dims;
    std::vector<double> values;
    for (const auto& d : doc.at("dims")) {
        if (!d.is_number_integer() || d.get<long long>() < 1)
            throw InputError("\"dims\" must hold positive integers");
        dims.push_back(d.get<std::size_t>());
    }
    for (const auto& v : doc.at("values")) {
        if (!v.is_number())
            throw InputError("\"values\" must hold numbers");
        values.push_back(v.get<double>());
    }
    try {
        return {DenseTensor(std::move(dims), std::move(values)), sha256_hex(bytes)};
    } catch (const Error& e) {
        throw InputError(e.what());
    }
}

Vector parse_vector(const std::string& text)
{
    Vector out;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t comma = std::min(text.find(',', pos), text.size());
        const std::string item = text.substr(pos, comma - pos);
        double v = 0.0;
        const auto res = std::from_chars(item.data(), item.data() + item.size(), v);
        if (item.empty() || res.ec != std::errc() || res.ptr != item.data() + item.size())
            throw InputError("cannot parse '" + item + "' as a number in vector '" + text + "'");
        out.push_back(v);
        pos = comma + 1;
    }
    return out;
}

std::vector<int> parse_exponents(const std::string& text)
{
    std::vector<int> out;
    for (double v : parse_vector(text)) {
        if (v != static_cast<int>(v))
            throw InputError("norm exponents must be integers, got '" + text + "'");
        out.push_back(static_cast<int>(v));
    }
    return out;
}

std::string fmt17(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

struct Options
{
    std::string file;
    std::string p = "2";
    double tol = 1e-10;
    int max_iter = 1000;
    int restarts = 32;
    std::uint64_t seed = 0;
    std::optional<int> mode;
    std::string kind = "singular";
    int resolution = oracle_default_resolution;
    std::string format = "structured";
    bool force = false;
    bool damped = false;
    bool timing = false;
    std::vector<std::string> vectors;

    SolverConfig config() const
    {
        SolverConfig c;
        c.tol = tol;
        c.max_iter = max_iter;
        c.restarts = restarts;
        c.seed = seed;
        try {
            c.validate();
        } catch (const Error& e) {
            throw InputError(e.what());
        }
        return c;
    }
};

json config_json(const Options& o, const std::vector<int>& p)
{
    json c;
    if (!p.empty())
        c["p"] = p;
    c["tol"] = o.tol;
    c["max_iter"] = o.max_iter;
    c["restarts"] = o.restarts;
    c["seed"] = o.seed;
    return c;
}

json vec_json(const Vector& v) { return json(v); }

/// One command's output plus its exit code.
struct Report
{
    json body;
    std::vector<std::string> text;
    int code = exit_ok;
};

Report start_report(const std::string& command, const LoadedTensor& t)
{
    Report r;
    r.body["command"] = command;
    r.body["input_digest"] = t.digest;
    return r;
}

std::string join(const Vector& v)
{
    std::string s = "[";
    for (std::size_t i = 0; i < v.size(); ++i)
        s += (i ? ", " : "") + fmt17(v[i]);
    return s + "]";
}

Report run_singular(const Options& o)
{
    const auto t = load_tensor(o.file);
    const auto cfg = o.config();
    const auto ps = PNormSpec(parse_exponents(o.p)).expand(t.tensor.order());
    Report r = start_report("singular", t);
    r.body["config"] = config_json(o, ps);
    json results = json::array();
    json warnings = json::array();
    auto pairs = singular_pairs(t.tensor, PNormSpec(ps), cfg);
    if (pairs.empty()) {
        pairs.push_back(solve_singular_pair(t.tensor, PNormSpec(ps), cfg));
        warnings.push_back("no restart converged; reporting the best iterate");
        r.code = exit_not_converged;
    }
    for (const auto& pr : pairs) {
        json e;
        e["sigma"] = pr.sigma;
        e["residual"] = pr.residual;
        e["converged"] = pr.converged;
        json vs = json::array();
        for (const auto& v : pr.vectors)
            vs.push_back(vec_json(v));
        e["vectors"] = vs;
        results.push_back(e);
        r.text.push_back("sigma " + fmt17(pr.sigma) + "  residual " + fmt17(pr.residual)
                         + (pr.converged ? "" : "  (not converged)"));
        for (std::size_t i = 0; i < pr.vectors.size(); ++i)
            r.text.push_back("  x" + std::to_string(i + 1) + " " + join(pr.vectors[i]));
    }
    r.body["results"] = results;
    r.body["warnings"] = warnings;
    return r;
}

Report run_eigen(const Options& o)
{
    const auto t = load_tensor(o.file);
    const auto cfg = o.config();
    const auto exps = parse_exponents(o.p);
    if (exps.size() != 1)
        throw InputError("eigen takes a single norm exponent --p");
    const int p = exps.front();
    if (p < 2)
        throw InputError("norm exponent must be an integer >= 2");
    Report r = start_report("eigen", t);
    auto config = config_json(o, {p});
    std::vector<EigenPair> pairs;
    if (o.mode) {
        if (*o.mode < 1 || static_cast<std::size_t>(*o.mode) > t.tensor.order())
            throw InputError("--mode must lie in 1.." + std::to_string(t.tensor.order()));
        config["mode"] = *o.mode;
        pairs = solve_mode_eigenpairs(t.tensor, static_cast<std::size_t>(*o.mode - 1), p, cfg);
    } else {
        if (!t.tensor.is_cubical())
            throw DimensionError("eigenpairs require a cubical tensor");
        if (!is_symmetric(t.tensor))
            throw SymmetryError("tensor is not symmetric; pass --mode to solve one mode of the nonsymmetric problem");
        pairs = solve_symmetric_eigenpairs(t.tensor, p, cfg);
    }
    r.body["config"] = config;
    json results = json::array();
    json warnings = json::array();
    for (const auto& pr : pairs) {
        json e;
        e["lambda"] = pr.lambda;
        e["mode"] = pr.mode + 1;
        e["residual"] = pr.residual;
        e["converged"] = pr.converged;
        e["vector"] = vec_json(pr.vector);
        results.push_back(e);
        r.text.push_back("lambda " + fmt17(pr.lambda) + "  residual " + fmt17(pr.residual) + "  x "
                         + join(pr.vector));
    }
    if (pairs.empty()) {
        warnings.push_back("no restart converged");
        r.code = exit_not_converged;
    }
    r.body["results"] = results;
    r.body["warnings"] = warnings;
    return r;
}

Report run_perron(const Options& o)
{
    const auto t = load_tensor(o.file);
    const auto cfg = o.config();
    Report r = start_report("perron", t);
    auto config = config_json(o, {});
    config["force"] = o.force;
    config["damped"] = o.damped;
    r.body["config"] = config;
    PerronOptions opts;
    opts.force = o.force;
    opts.damped = o.damped;
    const auto res = solve_perron(t.tensor, cfg, opts);
    json warnings = json::array();
    for (const auto& w : res.warnings)
        warnings.push_back(w);
    if (!res.converged) {
        warnings.push_back("Collatz-Wielandt gap did not close within max_iter");
        r.code = exit_not_converged;
    }
    const auto nonneg = nonnegative_eigenpairs(t.tensor, cfg);
    if (nonneg.size() > 1)
        warnings.push_back("multi-start found " + std::to_string(nonneg.size())
                           + " distinct nonnegative l^k eigenvectors");
    json e;
    e["lambda"] = res.lambda;
    e["lower"] = res.lower;
    e["upper"] = res.upper;
    e["iterations"] = res.iterations;
    e["residual"] = res.residual;
    e["converged"] = res.converged;
    e["vector"] = vec_json(res.vector);
    r.body["results"] = json::array({e});
    r.body["warnings"] = warnings;
    r.text.push_back("lambda " + fmt17(res.lambda) + "  bounds [" + fmt17(res.lower) + ", " + fmt17(res.upper)
                     + "]  iterations " + std::to_string(res.iterations) + "  residual " + fmt17(res.residual));
    r.text.push_back("  x " + join(res.vector));
    return r;
}

Report run_check(const Options& o)
{
    const auto t = load_tensor(o.file);
    Report r = start_report("check", t);
    const auto& a = t.tensor;
    json e;
    e["dims"] = a.dims();
    e["cubical"] = a.is_cubical();
    e["symmetric"] = is_symmetric(a);
    e["nonnegative"] = is_nonnegative(a);
    json warnings = json::array();
    if (a.is_cubical() && a.dim(0) <= reducibility_size_limit) {
        const auto s = find_reducing_set(a);
        e["irreducible"] = !s.has_value();
        json set = json::array();
        if (s)
            for (auto i : *s)
                set.push_back(i + 1);
        e["reducing_set"] = set;
    } else if (a.is_cubical()) {
        warnings.push_back("reducibility not checked: n exceeds " + std::to_string(reducibility_size_limit));
    }
    r.body["results"] = json::array({e});
    r.body["warnings"] = warnings;
    for (const auto& [k, v] : e.items())
        r.text.push_back(k + ": " + v.dump());
    return r;
}

Report run_oracle(const Options& o)
{
    const auto t = load_tensor(o.file);
    CriticalKind kind;
    if (o.kind == "singular")
        kind = CriticalKind::singular;
    else if (o.kind == "eigen")
        kind = CriticalKind::eigen;
    else
        throw InputError("--kind must be 'singular' or 'eigen'");
    if (o.resolution < 1)
        throw InputError("--resolution must be positive");
    const auto exps = parse_exponents(o.p);
    PNormSpec spec(exps);
    const auto ps = kind == CriticalKind::eigen ? std::vector<int>{spec.at(0)} : spec.expand(t.tensor.order());
    Report r = start_report("oracle", t);
    json config;
    config["p"] = ps;
    config["kind"] = o.kind;
    config["resolution"] = o.resolution;
    r.body["config"] = config;
    const auto pts = enumerate_critical_points(t.tensor, PNormSpec(ps), kind, o.resolution);
    json results = json::array();
    for (const auto& pt : pts) {
        json e;
        e["value"] = pt.value;
        e["residual"] = pt.residual;
        json vs = json::array();
        for (const auto& v : pt.vectors)
            vs.push_back(vec_json(v));
        e["vectors"] = vs;
        results.push_back(e);
        r.text.push_back("value " + fmt17(pt.value) + "  residual " + fmt17(pt.residual));
    }
    r.body["results"] = results;
    r.body["warnings"] = json::array();
    return r;
}

void emit(const Report& r, const Options& o, double ms)
{
    if (o.format == "text") {
        for (const auto& line : r.text)
            std::cout << line << '\n';
        for (const auto& w : r.body.value("warnings", json::array()))
            std::cout << "warning: " << w.get<std::string>() << '\n';
        if (o.timing)
            std::cout << "wall time " << ms << " ms\n";
        return;
    }
    json body = r.body;
    if (o.timing)
        body["wall_time_ms"] = ms;
    std::cout << body.dump(2) << '\n';
}

int classify(const Error& e)
{
    if (dynamic_cast<const ReducibleError*>(&e) || dynamic_cast<const SymmetryError*>(&e)
        || dynamic_cast<const DomainError*>(&e) || dynamic_cast<const ZeroTensorError*>(&e)
        || dynamic_cast<const SizeLimitError*>(&e))
        return exit_precondition;
    if (dynamic_cast<const DegenerateIterateError*>(&e))
        return exit_not_converged;
    return exit_input;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"lpspec: l^p singular values, eigenvalues and Perron vectors of dense tensors.\n"
                 "Modes and indices are 1-based in all options and messages (mode 1 is the first index);\n"
                 "reported vectors are plain arrays. Vectors on the command line are comma-separated\n"
                 "decimals; put '--' before vectors that start with '-'."};
    app.require_subcommand(1);
    Options o;

    auto add_file = [&](CLI::App* sub) { sub->add_option("file", o.file, "tensor JSON file")->required(); };
    auto add_solver = [&](CLI::App* sub) {
        sub->add_option("--tol", o.tol, "convergence tolerance")->capture_default_str();
        sub->add_option("--max-iter", o.max_iter, "iteration cap per run")->capture_default_str();
        sub->add_option("--restarts", o.restarts, "number of seeded random starts")->capture_default_str();
        sub->add_option("--seed", o.seed, "random seed")->capture_default_str();
    };
    auto add_output = [&](CLI::App* sub) {
        sub->add_option("--format", o.format, "structured (JSON) or text")
            ->check(CLI::IsMember({"structured", "text"}))
            ->capture_default_str();
        sub->add_flag("--timing", o.timing, "include wall time (makes output run-dependent)");
    };

    auto* eval = app.add_subcommand("eval", "print A(x_1, ..., x_k) with 17 significant digits");
    add_file(eval);
    eval->add_option("vectors", o.vectors, "one comma-separated vector per mode")->required();

    auto* singular = app.add_subcommand("singular", "l^{p_1..p_k} singular pairs");
    add_file(singular);
    singular->add_option("--p", o.p, "norm exponent, or comma list with one per mode")->capture_default_str();
    add_solver(singular);
    add_output(singular);

    auto* eigen = app.add_subcommand("eigen", "l^p eigenpairs (symmetric, or one mode with --mode)");
    add_file(eigen);
    eigen->add_option("--p", o.p, "norm exponent")->capture_default_str();
    eigen->add_option("--mode", o.mode, "1-based identity slot for nonsymmetric tensors");
    add_solver(eigen);
    add_output(eigen);

    auto* perron = app.add_subcommand("perron", "positive l^k eigenpair of a nonnegative irreducible tensor");
    add_file(perron);
    perron->add_flag("--force", o.force, "run even if the tensor is reducible");
    perron->add_flag("--damped", o.damped, "use the damped update");
    add_solver(perron);
    add_output(perron);

    auto* check = app.add_subcommand("check", "report symmetry, nonnegativity and a reducing set");
    add_file(check);
    add_output(check);

    auto* oracle = app.add_subcommand("oracle", "brute-force critical points from a dense angular grid");
    add_file(oracle);
    oracle->add_option("--p", o.p, "norm exponent(s)")->capture_default_str();
    oracle->add_option("--kind", o.kind, "singular or eigen")->capture_default_str();
    oracle->add_option("--resolution", o.resolution, "grid steps per angle")->capture_default_str();
    add_output(oracle);

    auto* hyperdet = app.add_subcommand("hyperdet", "Cayley hyperdeterminant of a 2x2x2 tensor");
    add_file(hyperdet);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return exit_input;
    }

    const auto t0 = std::chrono::steady_clock::now();
    try {
        if (eval->parsed()) {
            const auto t = load_tensor(o.file);
            std::vector<Vector> xs;
            for (const auto& s : o.vectors)
                xs.push_back(parse_vector(s));
            std::cout << fmt17(multilinear_eval(t.tensor, xs)) << '\n';
            return exit_ok;
        }
        if (hyperdet->parsed()) {
            const auto t = load_tensor(o.file);
            std::cout << fmt17(hyperdet_222(t.tensor)) << '\n';
            return exit_ok;
        }
        Report r;
        if (singular->parsed())
            r = run_singular(o);
        else if (eigen->parsed())
            r = run_eigen(o);
        else if (perron->parsed())
            r = run_perron(o);
        else if (check->parsed())
            r = run_check(o);
        else
            r = run_oracle(o);
        const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
        emit(r, o, ms);
        return r.code;
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_input;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return classify(e);
    }
}
