#include "rsgame/scenario.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "rsgame/errors.hpp"

namespace rsgame {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& msg) { throw ScenarioParseError(msg); }

double as_number(const json& v, const std::string& field) {
    if (!v.is_number()) fail("field '" + field + "' must be a number");
    return v.get<double>();
}

int as_count(const json& v, const std::string& field) {
    if (!v.is_number_integer() || v.get<long long>() < 0)
        fail("field '" + field + "' must be a nonnegative integer");
    return static_cast<int>(v.get<long long>());
}

Eigen::VectorXd as_vector(const json& v, const std::string& field) {
    if (!v.is_array()) fail("field '" + field + "' must be an array of numbers");
    Eigen::VectorXd out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!v[i].is_number()) fail("field '" + field + "' must contain numbers only");
        out(i) = v[i].get<double>();
    }
    return out;
}

// Row-major nested arrays; every row must have the same length.
Eigen::MatrixXd as_matrix(const json& v, const std::string& field) {
    if (!v.is_array() || v.empty()) fail("field '" + field + "' must be a nonempty nested array");
    if (!v[0].is_array()) fail("field '" + field + "' must be a nested (row-major) array");
    const std::size_t cols = v[0].size();
    Eigen::MatrixXd out(v.size(), cols);
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!v[i].is_array() || v[i].size() != cols)
            fail("field '" + field + "' has ragged rows");
        for (std::size_t j = 0; j < cols; ++j) {
            if (!v[i][j].is_number()) fail("field '" + field + "' must contain numbers only");
            out(i, j) = v[i][j].get<double>();
        }
    }
    return out;
}

// A row vector may be written flat or as a single nested row.
Eigen::RowVectorXd as_row_vector(const json& v, const std::string& field) {
    if (v.is_array() && !v.empty() && v[0].is_array()) {
        const Eigen::MatrixXd m = as_matrix(v, field);
        if (m.rows() != 1) fail("field '" + field + "' must be a single row");
        return m.row(0);
    }
    return as_vector(v, field).transpose();
}

// Either a constant or a breakpoint table [[t, value], ...].
TimeScalar as_time_scalar(const json& v, const std::string& field) {
    if (v.is_number()) return TimeScalar(v.get<double>());
    if (!v.is_array()) fail("field '" + field + "' must be a number or a [[t, value], ...] table");
    std::vector<std::pair<double, double>> pts;
    for (const auto& row : v) {
        if (!row.is_array() || row.size() != 2 || !row[0].is_number() || !row[1].is_number())
            fail("field '" + field + "' breakpoints must be [t, value] number pairs");
        pts.emplace_back(row[0].get<double>(), row[1].get<double>());
    }
    try {
        return TimeScalar(std::move(pts));
    } catch (const std::invalid_argument& e) {
        fail("field '" + field + "': " + e.what());
    }
}

json time_scalar_to_json(const TimeScalar& ts) {
    if (ts.is_constant()) return ts.breakpoints().front().second;
    json arr = json::array();
    for (const auto& [t, v] : ts.breakpoints()) arr.push_back(json::array({t, v}));
    return arr;
}

template <typename Mat>
json matrix_to_json(const Mat& m) {
    json rows = json::array();
    for (long i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (long j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

json vector_to_json(const Eigen::VectorXd& v) {
    json arr = json::array();
    for (long i = 0; i < v.size(); ++i) arr.push_back(v(i));
    return arr;
}

}  // namespace

Scenario scenario_from_json(const nlohmann::json& doc) {
    if (!doc.is_object()) fail("scenario document must be a JSON object");
    static const std::set<std::string> known = {
        "m", "n", "a", "A", "b", "B", "Sigma", "Lambda", "r", "alpha", "beta",
        "theta", "T", "x0", "v0", "l0", "n_steps", "n_paths", "seed", "tol_res"};
    for (const auto& item : doc.items()) {
        if (!known.count(item.key())) fail("unknown field '" + item.key() + "'");
    }
    static const char* required[] = {"m", "n", "a", "A", "b", "B", "Sigma", "Lambda",
                                     "r", "alpha", "beta", "theta", "T", "x0", "v0", "l0"};
    for (const char* key : required)
        if (!doc.contains(key)) fail(std::string("missing required field '") + key + "'");

    Scenario sc;
    sc.declared_m = as_count(doc["m"], "m");
    sc.declared_n = as_count(doc["n"], "n");
    sc.model.a = as_vector(doc["a"], "a");
    sc.model.A = as_matrix(doc["A"], "A");
    sc.model.b = as_vector(doc["b"], "b");
    sc.model.B = as_matrix(doc["B"], "B");
    sc.model.Sigma = as_matrix(doc["Sigma"], "Sigma");
    sc.model.Lambda = as_matrix(doc["Lambda"], "Lambda");
    sc.model.r = as_time_scalar(doc["r"], "r");
    sc.model.alpha = as_time_scalar(doc["alpha"], "alpha");
    sc.model.beta = as_row_vector(doc["beta"], "beta");
    sc.spec.theta = as_number(doc["theta"], "theta");
    sc.spec.horizon = as_number(doc["T"], "T");
    sc.spec.x0 = as_vector(doc["x0"], "x0");
    sc.spec.v0 = as_number(doc["v0"], "v0");
    sc.spec.l0 = as_number(doc["l0"], "l0");

    if (doc.contains("n_steps")) sc.run.n_steps = as_count(doc["n_steps"], "n_steps");
    if (doc.contains("n_paths")) sc.run.n_paths = as_count(doc["n_paths"], "n_paths");
    if (doc.contains("seed")) {
        const auto& sv = doc["seed"];
        if (sv.is_number_unsigned())
            sc.run.seed = sv.get<std::uint64_t>();
        else if (sv.is_number_integer() && sv.get<long long>() >= 0)
            sc.run.seed = static_cast<std::uint64_t>(sv.get<long long>());
        else
            fail("field 'seed' must be a nonnegative integer");
    }
    if (doc.contains("tol_res")) {
        sc.run.tol_res = as_number(doc["tol_res"], "tol_res");
        if (!(sc.run.tol_res > 0.0)) fail("field 'tol_res' must be positive");
    }
    return sc;
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail("cannot open scenario file '" + path + "'");
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        fail("scenario file '" + path + "' is not valid JSON: " + e.what());
    }
    return scenario_from_json(doc);
}

nlohmann::ordered_json scenario_to_json(const Scenario& sc) {
    nlohmann::ordered_json doc;
    doc["m"] = sc.declared_m ? sc.declared_m : sc.model.m();
    doc["n"] = sc.declared_n ? sc.declared_n : sc.model.n();
    doc["a"] = vector_to_json(sc.model.a);
    doc["A"] = matrix_to_json(sc.model.A);
    doc["b"] = vector_to_json(sc.model.b);
    doc["B"] = matrix_to_json(sc.model.B);
    doc["Sigma"] = matrix_to_json(sc.model.Sigma);
    doc["Lambda"] = matrix_to_json(sc.model.Lambda);
    doc["r"] = time_scalar_to_json(sc.model.r);
    doc["alpha"] = time_scalar_to_json(sc.model.alpha);
    doc["beta"] = vector_to_json(sc.model.beta.transpose());
    doc["theta"] = sc.spec.theta;
    doc["T"] = sc.spec.horizon;
    doc["x0"] = vector_to_json(sc.spec.x0);
    doc["v0"] = sc.spec.v0;
    doc["l0"] = sc.spec.l0;
    doc["n_steps"] = sc.run.n_steps;
    doc["n_paths"] = sc.run.n_paths;
    doc["seed"] = sc.run.seed;
    doc["tol_res"] = sc.run.tol_res;
    return doc;
}

ValidationReport validate_scenario(const Scenario& sc, const ValidationOptions& opts) {
    ValidationReport rep = validate(sc.model, sc.spec, opts);
    auto mismatch = [&](const std::string& field, const std::string& msg) {
        rep.errors.push_back({IssueKind::DimensionMismatch, field, msg});
    };
    if (sc.declared_m != sc.model.m()) {
        std::ostringstream os;
        os << "declared m = " << sc.declared_m << " but a has " << sc.model.m() << " entries";
        mismatch("m", os.str());
    }
    if (sc.declared_n != sc.model.n()) {
        std::ostringstream os;
        os << "declared n = " << sc.declared_n << " but b has " << sc.model.n() << " entries";
        mismatch("n", os.str());
    }
    return rep;
}

}  // namespace rsgame
