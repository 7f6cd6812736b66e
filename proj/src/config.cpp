#include "sconv/config.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace sconv {

namespace {

using nlohmann::json;

/// Typed access to a JSON value with its pointer for diagnostics.
class Field {
public:
    Field(const json& value, std::string pointer, const std::string& source)
        : value_(value), pointer_(std::move(pointer)), source_(source)
    {
    }

    [[noreturn]] void fail(const std::string& what) const
    {
        throw ConfigError(source_ + ": field " + (pointer_.empty() ? "/" : pointer_) + ": " + what);
    }

    const json& raw() const { return value_; }
    const std::string& pointer() const { return pointer_; }

    bool has(const std::string& key) const { return value_.is_object() && value_.contains(key); }

    Field at(const std::string& key) const
    {
        if (!value_.is_object())
            fail("expected an object");
        if (!value_.contains(key))
            Field(value_, pointer_ + "/" + key, source_).fail("missing required field");
        return Field(value_.at(key), pointer_ + "/" + key, source_);
    }

    Field at(std::size_t index) const
    {
        return Field(value_.at(index), pointer_ + "/" + std::to_string(index), source_);
    }

    std::size_t size() const
    {
        if (!value_.is_array())
            fail("expected an array");
        return value_.size();
    }

    double number() const
    {
        if (!value_.is_number())
            fail("expected a number");
        const double v = value_.get<double>();
        if (!std::isfinite(v))
            fail("expected a finite number");
        return v;
    }

    double positive() const
    {
        const double v = number();
        if (!(v > 0.0))
            fail("expected a positive number");
        return v;
    }

    std::uint64_t unsigned_integer() const
    {
        if (!value_.is_number_integer() || (value_.is_number_integer() && !value_.is_number_unsigned() &&
                                            value_.get<std::int64_t>() < 0))
            fail("expected a nonnegative integer");
        return value_.get<std::uint64_t>();
    }

    std::size_t count() const
    {
        const std::uint64_t v = unsigned_integer();
        if (v == 0)
            fail("expected a positive integer");
        return static_cast<std::size_t>(v);
    }

    bool boolean() const
    {
        if (!value_.is_boolean())
            fail("expected true or false");
        return value_.get<bool>();
    }

    std::string text() const
    {
        if (!value_.is_string())
            fail("expected a string");
        return value_.get<std::string>();
    }

    std::vector<double> numbers() const
    {
        std::vector<double> out;
        for (std::size_t i = 0; i < size(); ++i)
            out.push_back(at(i).number());
        return out;
    }

    StateVector vector(std::size_t dim) const
    {
        std::vector<double> v = numbers();
        if (v.size() != dim)
            fail("expected " + std::to_string(dim) + " coordinates, got " + std::to_string(v.size()));
        return StateVector(std::move(v));
    }

private:
    const json& value_;
    std::string pointer_;
    const std::string& source_;
};

DiagonalGenerator read_generator(const Field& g)
{
    if (g.has("eigenvalues")) {
        std::vector<double> a = g.at("eigenvalues").numbers();
        if (a.empty())
            g.at("eigenvalues").fail("expected at least one eigenvalue");
        return DiagonalGenerator(std::move(a));
    }
    const std::string family = g.at("family").text();
    if (family != "laplacian")
        g.at("family").fail("unknown generator family '" + family + "' (use \"laplacian\" or \"eigenvalues\")");
    const std::size_t dim = g.at("dim").count();
    const double scale = g.has("scale") ? g.at("scale").number() : 1.0;
    if (scale < 0.0)
        g.at("scale").fail("expected a nonnegative number");
    const double shift = g.has("shift") ? g.at("shift").number() : 0.0;
    return DiagonalGenerator::laplacian(dim, scale, shift);
}

MarkSpace read_marks(const Field& m)
{
    std::vector<std::string> labels;
    std::vector<double> nu;
    for (std::size_t j = 0; j < m.size(); ++j) {
        const Field mark = m.at(j);
        labels.push_back(mark.has("label") ? mark.at("label").text() : "m" + std::to_string(j + 1));
        nu.push_back(mark.at("nu").positive());
    }
    if (nu.empty())
        m.fail("expected at least one mark");
    return MarkSpace(std::move(labels), std::move(nu));
}

std::vector<StateVector> read_vectors(const Field& f, std::size_t count, std::size_t dim)
{
    if (f.size() != count)
        f.fail("expected " + std::to_string(count) + " vectors (one per mark)");
    std::vector<StateVector> out;
    for (std::size_t j = 0; j < count; ++j)
        out.push_back(f.at(j).vector(dim));
    return out;
}

ConvolutionScenario read_convolution(const Field& root, const std::string& name)
{
    DiagonalGenerator gen = read_generator(root.at("generator"));
    const std::size_t d = gen.dim();
    MarkSpace marks = read_marks(root.at("marks"));

    OscillatingField drift{StateVector(d), StateVector(d), 0.0};
    if (root.has("drift")) {
        const Field f = root.at("drift");
        if (f.has("constant"))
            drift.constant = f.at("constant").vector(d);
        if (f.has("oscillation"))
            drift.oscillation = f.at("oscillation").vector(d);
        if (f.has("frequency"))
            drift.frequency = f.at("frequency").number();
    }

    JumpMap jumps;
    if (root.has("jumps")) {
        const Field f = root.at("jumps");
        jumps.base = read_vectors(f.at("base"), marks.size(), d);
        if (f.has("oscillation"))
            jumps.oscillation = read_vectors(f.at("oscillation"), marks.size(), d);
        if (f.has("frequency"))
            jumps.frequency = f.at("frequency").number();
    } else {
        jumps.base.assign(marks.size(), StateVector(d));
    }

    const double horizon = root.at("horizon").positive();
    StateVector x0 = root.at("x0").vector(d);
    return ConvolutionScenario{name, std::move(gen), std::move(marks), std::move(jumps), std::move(drift),
                               std::move(x0), horizon};
}

InitialCondition read_initial(const Field& f, std::size_t d)
{
    if (f.raw().is_array())
        return InitialCondition::point(f.vector(d));
    StateVector mean = f.at("mean").vector(d);
    if (!f.has("stddev"))
        return InitialCondition::point(std::move(mean));
    return InitialCondition::gaussian(std::move(mean), f.at("stddev").positive(), f.at("radius").positive());
}

EquationSpec read_equation(const Field& root)
{
    DiagonalGenerator gen = read_generator(root.at("generator"));
    const std::size_t d = gen.dim();
    MarkSpace marks = read_marks(root.at("marks"));

    const Field df = root.at("drift");
    const std::string family = df.at("family").text();
    DriftSpec drift;
    if (family == "affine") {
        const Field lf = df.at("L");
        if (lf.size() != d)
            lf.fail("expected a " + std::to_string(d) + "x" + std::to_string(d) + " matrix");
        std::vector<std::vector<double>> rows;
        for (std::size_t i = 0; i < d; ++i) {
            const StateVector row = lf.at(i).vector(d);
            rows.emplace_back(row.coords().begin(), row.coords().end());
        }
        drift = DriftSpec::affine(df.has("b") ? df.at("b").vector(d) : StateVector(d), SquareMatrix(std::move(rows)));
    } else if (family == "cubic") {
        const double c = df.at("c").number();
        if (c < 0.0)
            df.at("c").fail("expected c >= 0");
        drift = DriftSpec::monotone_cubic(d, df.at("mu").number(), c,
                                          df.has("radius") ? df.at("radius").positive() : 10.0);
    } else {
        df.at("family").fail("unknown drift family '" + family + "' (use \"affine\" or \"cubic\")");
    }

    JumpCoefficientSpec jump = JumpCoefficientSpec::none(marks.size(), d);
    if (root.has("jumps")) {
        const Field jf = root.at("jumps");
        jump.gamma = jf.at("gamma").numbers();
        if (jump.gamma.size() != marks.size())
            jf.at("gamma").fail("expected one gamma per mark");
        jump.beta = read_vectors(jf.at("beta"), marks.size(), d);
    }

    EquationSpec spec{std::move(gen), std::move(drift), std::move(jump), std::move(marks),
                      read_initial(root.at("x0"), d), root.at("horizon").positive(), 2.0,
                      DriftScheme::explicit_euler};
    if (root.has("p")) {
        spec.p = root.at("p").number();
        if (spec.p < 2.0)
            root.at("p").fail("expected p >= 2");
    }
    if (root.has("scheme")) {
        const std::string scheme = root.at("scheme").text();
        if (scheme == "implicit")
            spec.scheme = DriftScheme::implicit_fixed_point;
        else if (scheme != "explicit")
            root.at("scheme").fail("expected \"explicit\" or \"implicit\"");
    }
    return spec;
}

std::string locate(std::string_view text, std::size_t byte)
{
    std::size_t line = 1, column = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            column = 1;
        } else {
            ++column;
        }
    }
    return "line " + std::to_string(line) + ", column " + std::to_string(column);
}

void apply_overrides(json& doc, const ConfigOverrides& o)
{
    if (o.seed)
        doc["seed"] = *o.seed;
    if (o.workers)
        doc["workers"] = *o.workers;
    if (o.paths)
        doc["paths"] = *o.paths;
    if (o.grid_levels)
        doc["grid"]["levels"] = *o.grid_levels;
    if (o.out_dir)
        doc["out"] = o.out_dir->string();
}

}  // namespace

ExperimentConfig parse_config(std::string_view text, std::string_view source, const ConfigOverrides& overrides)
{
    const std::string src(source);
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        const std::size_t byte = e.byte > 0 ? e.byte - 1 : 0;
        std::string detail = e.what();
        if (const auto pos = detail.find("syntax error"); pos != std::string::npos)
            detail = detail.substr(pos);
        throw ConfigError(src + ": " + locate(text, byte) + ": " + detail);
    }
    if (!doc.is_object())
        throw ConfigError(src + ": line 1, column 1: top level must be a JSON object");
    apply_overrides(doc, overrides);

    const Field root(doc, "", src);
    ExperimentConfig cfg;
    if (!root.has("seed"))
        root.at("seed");  // master seed is mandatory
    cfg.seed = root.at("seed").unsigned_integer();
    cfg.scenario = root.has("name") ? root.at("name").text() : "custom";
    cfg.description = root.has("description") ? root.at("description").text() : "";
    cfg.paths = root.has("paths") ? root.at("paths").count() : cfg.paths;
    if (root.has("workers")) {
        const std::size_t w = root.at("workers").count();
        if (w > 1024)
            root.at("workers").fail("at most 1024 workers");
        cfg.workers = static_cast<unsigned>(w);
    }
    if (root.has("grid")) {
        const Field g = root.at("grid");
        if (g.has("cells"))
            cfg.cells = g.at("cells").count();
        if (g.has("levels"))
            cfg.levels = g.at("levels").count();
        if (cfg.levels > 12)
            g.at("levels").fail("at most 12 refinement levels");
    }
    if (root.has("out"))
        cfg.out_dir = root.at("out").text();

    const std::string kind = root.has("kind") ? root.at("kind").text() : "convolution";
    if (kind == "convolution") {
        cfg.kind = ScenarioKind::convolution;
        cfg.convolution = read_convolution(root, cfg.scenario);
    } else if (kind == "equation") {
        cfg.kind = ScenarioKind::equation;
        cfg.equation = read_equation(root);
        if (root.has("y0"))
            cfg.y0 = root.at("y0").vector(cfg.equation->gen.dim());
    } else {
        root.at("kind").fail("expected \"convolution\" or \"equation\"");
    }

    if (root.has("pathwise")) {
        const Field f = root.at("pathwise");
        if (f.has("p")) {
            cfg.pathwise.p = f.at("p").numbers();
            for (std::size_t i = 0; i < cfg.pathwise.p.size(); ++i) {
                if (cfg.pathwise.p[i] < 2.0)
                    f.at("p").at(i).fail("expected p >= 2");
            }
            if (cfg.pathwise.p.empty())
                f.at("p").fail("expected at least one exponent");
        }
        if (f.has("battery"))
            cfg.pathwise.random_battery = f.at("battery").boolean();
        if (f.has("left_endpoint_diagnostic"))
            cfg.pathwise.left_endpoint_diagnostic = f.at("left_endpoint_diagnostic").boolean();
        if (f.has("csv_cases"))
            cfg.pathwise.csv_cases = static_cast<std::size_t>(f.at("csv_cases").unsigned_integer());
    }
    if (root.has("moments")) {
        const Field f = root.at("moments");
        auto positives = [&](const char* key, std::vector<double>& target) {
            if (!f.has(key))
                return;
            target = f.at(key).numbers();
            for (std::size_t i = 0; i < target.size(); ++i) {
                if (!(target[i] > 0.0))
                    f.at(key).at(i).fail("expected a positive number");
            }
        };
        positives("intensity", cfg.moments.intensity);
        positives("scaling", cfg.moments.scaling);
        positives("burkholder_p", cfg.moments.burkholder_p);
        positives("bichteler_p", cfg.moments.bichteler_p);
        positives("bdg_k", cfg.moments.bdg_k);
        if (f.has("bdg_p"))
            cfg.moments.bdg_p = f.at("bdg_p").number();
        if (f.has("bdg_x_weight"))
            cfg.moments.bdg_x_weight = f.at("bdg_x_weight").number();
    }
    if (root.has("picard")) {
        const Field f = root.at("picard");
        if (f.has("iterations"))
            cfg.picard.iterations = f.at("iterations").count();
        if (f.has("cross_check_paths"))
            cfg.picard.cross_check_paths = f.at("cross_check_paths").count();
        if (f.has("cross_check_iterations"))
            cfg.picard.cross_check_iterations = f.at("cross_check_iterations").count();
    }

    // echo with defaults filled in
    json resolved = doc;
    resolved["name"] = cfg.scenario;
    resolved["kind"] = kind;
    resolved["paths"] = cfg.paths;
    resolved["workers"] = cfg.workers;
    resolved["grid"] = {{"cells", cfg.cells}, {"levels", cfg.levels}};
    if (cfg.kind == ScenarioKind::convolution) {
        resolved["pathwise"] = {{"p", cfg.pathwise.p},
                                {"battery", cfg.pathwise.random_battery},
                                {"left_endpoint_diagnostic", cfg.pathwise.left_endpoint_diagnostic},
                                {"csv_cases", cfg.pathwise.csv_cases}};
        resolved["moments"] = {{"intensity", cfg.moments.intensity},       {"scaling", cfg.moments.scaling},
                               {"burkholder_p", cfg.moments.burkholder_p}, {"bichteler_p", cfg.moments.bichteler_p},
                               {"bdg_p", cfg.moments.bdg_p},               {"bdg_k", cfg.moments.bdg_k},
                               {"bdg_x_weight", cfg.moments.bdg_x_weight}};
    } else {
        resolved["p"] = cfg.equation->p;
        resolved["scheme"] = cfg.equation->scheme == DriftScheme::implicit_fixed_point ? "implicit" : "explicit";
        resolved["picard"] = {{"iterations", cfg.picard.iterations},
                              {"cross_check_paths", cfg.picard.cross_check_paths},
                              {"cross_check_iterations", cfg.picard.cross_check_iterations}};
    }
    cfg.resolved_json = resolved.dump(2) + "\n";
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path, const ConfigOverrides& overrides)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ConfigError(path.string() + ": cannot open config file");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_config(buffer.str(), path.string(), overrides);
}

}  // namespace sconv
