#include "flatmaj/json_io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "flatmaj/errors.hpp"
#include "flatmaj/version.hpp"

namespace flatmaj {

namespace {

double require_number(const nlohmann::json& j, const std::string& context) {
    if (!j.is_number()) throw MalformedInput(context + " must be a number");
    return j.get<double>();
}

int require_positive_int(const nlohmann::json& j, const std::string& context) {
    if (!j.is_number_integer() || j.get<long long>() < 1)
        throw MalformedInput(context + " must be a positive integer");
    return static_cast<int>(j.get<long long>());
}

nlohmann::json complex_entries(const Matrix& m) {
    nlohmann::json data = nlohmann::json::array();
    for (long r = 0; r < m.rows(); ++r)
        for (long c = 0; c < m.cols(); ++c)
            data.push_back({m(r, c).real(), m(r, c).imag()});
    return data;
}

Matrix matrix_from_entries(const nlohmann::json& data, int rows, int cols,
                           const std::string& context) {
    if (!data.is_array() || data.size() != static_cast<std::size_t>(rows) * cols)
        throw MalformedInput(context + ": data must list rows*cols entries row-major");
    Matrix m(rows, cols);
    std::size_t k = 0;
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c, ++k) {
            const nlohmann::json& e = data[k];
            if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number())
                throw MalformedInput(context + ": entries must be [re, im] number pairs");
            m(r, c) = std::complex<double>(e[0].get<double>(), e[1].get<double>());
        }
    return m;
}

}  // namespace

nlohmann::json pair_to_json(const FlatPair& pair) {
    nlohmann::json j;
    if (!pair.label.empty()) j["label"] = pair.label;
    nlohmann::json blocks = nlohmann::json::array();
    for (const Block& blk : pair.blocks) {
        nlohmann::json b;
        b["p"] = blk.p;
        b["q"] = blk.q;
        b["F"] = blk.overlap ? nlohmann::json(*blk.overlap) : nlohmann::json(nullptr);
        blocks.push_back(std::move(b));
    }
    j["blocks"] = std::move(blocks);
    return j;
}

FlatPair pair_from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("blocks") || !j["blocks"].is_array())
        throw MalformedInput("pair: expected an object with a \"blocks\" array");
    FlatPair fp;
    if (j.contains("label")) {
        if (!j["label"].is_string()) throw MalformedInput("pair: \"label\" must be a string");
        fp.label = j["label"].get<std::string>();
    }
    for (const nlohmann::json& b : j["blocks"]) {
        if (!b.is_object() || !b.contains("p") || !b.contains("q"))
            throw MalformedInput("pair: each block needs \"p\" and \"q\"");
        Block blk;
        blk.p = require_number(b["p"], "pair: \"p\"");
        blk.q = require_number(b["q"], "pair: \"q\"");
        if (b.contains("F") && !b["F"].is_null())
            blk.overlap = require_number(b["F"], "pair: \"F\"");
        fp.blocks.push_back(blk);
    }
    return fp;
}

nlohmann::json matrix_to_json(const Matrix& m) {
    if (m.rows() != m.cols()) throw MalformedInput("matrix serialization expects a square matrix");
    nlohmann::json j;
    j["dim"] = static_cast<int>(m.rows());
    j["data"] = complex_entries(m);
    return j;
}

Matrix matrix_from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("dim") || !j.contains("data"))
        throw MalformedInput("matrix: expected an object with \"dim\" and \"data\"");
    const int dim = require_positive_int(j["dim"], "matrix: \"dim\"");
    return matrix_from_entries(j["data"], dim, dim, "matrix");
}

nlohmann::json kraus_matrix_to_json(const Matrix& m) {
    nlohmann::json j;
    j["rows"] = static_cast<int>(m.rows());
    j["cols"] = static_cast<int>(m.cols());
    j["data"] = complex_entries(m);
    return j;
}

Matrix kraus_matrix_from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("rows") || !j.contains("cols") || !j.contains("data"))
        throw MalformedInput("Kraus operator: expected \"rows\", \"cols\" and \"data\"");
    const int rows = require_positive_int(j["rows"], "Kraus operator: \"rows\"");
    const int cols = require_positive_int(j["cols"], "Kraus operator: \"cols\"");
    return matrix_from_entries(j["data"], rows, cols, "Kraus operator");
}

nlohmann::json channel_to_json(const ChannelRep& ch) {
    nlohmann::json j;
    j["dim_in"] = ch.dim_in();
    j["dim_out"] = ch.dim_out();
    nlohmann::json ops = nlohmann::json::array();
    for (const Matrix& k : ch.kraus) ops.push_back(kraus_matrix_to_json(k));
    j["kraus"] = std::move(ops);
    return j;
}

ChannelRep channel_from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("kraus") || !j["kraus"].is_array() || j["kraus"].empty())
        throw MalformedInput("channel: expected a nonempty \"kraus\" array");
    ChannelRep ch;
    for (const nlohmann::json& k : j["kraus"]) ch.kraus.push_back(kraus_matrix_from_json(k));
    for (const Matrix& k : ch.kraus)
        if (k.rows() != ch.kraus.front().rows() || k.cols() != ch.kraus.front().cols())
            throw MalformedInput("channel: Kraus operators must share one shape");
    if (j.contains("dim_in") &&
        require_positive_int(j["dim_in"], "channel: \"dim_in\"") != ch.dim_in())
        throw MalformedInput("channel: \"dim_in\" contradicts the Kraus shapes");
    if (j.contains("dim_out") &&
        require_positive_int(j["dim_out"], "channel: \"dim_out\"") != ch.dim_out())
        throw MalformedInput("channel: \"dim_out\" contradicts the Kraus shapes");
    return ch;
}

nlohmann::json json_number(double value) {
    return std::isfinite(value) ? nlohmann::json(value) : nlohmann::json(nullptr);
}

nlohmann::json make_report(const std::string& paper_anchor, const nlohmann::json& config,
                           nlohmann::json payload) {
    payload["schema"] = kReportSchema;
    payload["config"] = config;
    payload["paper_anchor"] = paper_anchor;
    return payload;
}

std::string stable_dump(const nlohmann::json& j) { return j.dump(2) + "\n"; }

nlohmann::json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw MalformedInput("cannot open file: " + path);
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw MalformedInput("invalid JSON in " + path + ": " + e.what());
    }
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw MalformedInput("cannot write file: " + path);
    out << content;
}

}  // namespace flatmaj
