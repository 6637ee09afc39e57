#include "edgeoffload/lstm.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <random>
#include <sstream>

namespace edgeoffload {

namespace {

bool all_finite(const Matrix& m) { return m.allFinite(); }
bool all_finite(const Vector& v) { return v.allFinite(); }

Vector logistic_vec(const Vector& z) {
    return z.unaryExpr([](double v) { return 1.0 / (1.0 + std::exp(-v)); });
}

Vector activate_candidate(const Vector& z, CandidateActivation activation) {
    if (activation == CandidateActivation::Tanh) {
        return z.array().tanh().matrix();
    }
    return logistic_vec(z);
}

}  // namespace

double logistic(double z) { return 1.0 / (1.0 + std::exp(-z)); }

LstmParams LstmParams::random_init(int input_dim, int hidden_dim, int input_len,
                                   std::uint64_t seed) {
    if (input_dim < 1 || hidden_dim < 1 || input_len < input_dim) {
        throw ValidationError("lstm dimensions must satisfy 1 <= input_dim <= input_len, hidden_dim >= 1");
    }
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(-0.08, 0.08);
    auto mat = [&](int rows, int cols) {
        Matrix m(rows, cols);
        for (int r = 0; r < rows; ++r) {
            for (int c = 0; c < cols; ++c) {
                m(r, c) = dist(rng);
            }
        }
        return m;
    };
    auto vec = [&](int n) {
        Vector v(n);
        for (int i = 0; i < n; ++i) {
            v(i) = dist(rng);
        }
        return v;
    };

    LstmParams p;
    p.input_dim = input_dim;
    p.hidden_dim = hidden_dim;
    p.input_len = input_len;
    p.u_forget = mat(hidden_dim, input_dim);
    p.z_forget = mat(hidden_dim, hidden_dim);
    // Forget bias starts positive so early training retains state.
    p.b_forget = Vector::Ones(hidden_dim);
    p.u_input = mat(hidden_dim, input_dim);
    p.z_input = mat(hidden_dim, hidden_dim);
    p.b_input = Vector::Zero(hidden_dim);
    p.u_output = mat(hidden_dim, input_dim);
    p.z_output = mat(hidden_dim, hidden_dim);
    p.b_output = Vector::Zero(hidden_dim);
    p.u_cand = mat(hidden_dim, input_dim);
    p.z_cand = mat(hidden_dim, hidden_dim);
    p.b_cand = Vector::Zero(hidden_dim);
    p.w_readout = vec(hidden_dim);
    p.b_readout = 0.0;
    return p;
}

void LstmParams::validate() const {
    const auto check_mat = [&](const Matrix& m, int rows, int cols, const char* name) {
        if (m.rows() != rows || m.cols() != cols) {
            throw ValidationError(std::string(name) + " has inconsistent dimensions");
        }
        if (!all_finite(m)) {
            throw ValidationError(std::string(name) + " contains non-finite entries");
        }
    };
    const auto check_vec = [&](const Vector& v, int n, const char* name) {
        if (v.size() != n) {
            throw ValidationError(std::string(name) + " has inconsistent dimensions");
        }
        if (!all_finite(v)) {
            throw ValidationError(std::string(name) + " contains non-finite entries");
        }
    };
    if (input_dim < 1 || hidden_dim < 1 || input_len < input_dim) {
        throw ValidationError("lstm dimensions out of range");
    }
    check_mat(u_forget, hidden_dim, input_dim, "Uf");
    check_mat(z_forget, hidden_dim, hidden_dim, "Zf");
    check_vec(b_forget, hidden_dim, "bf");
    check_mat(u_input, hidden_dim, input_dim, "Ui");
    check_mat(z_input, hidden_dim, hidden_dim, "Zi");
    check_vec(b_input, hidden_dim, "bi");
    check_mat(u_output, hidden_dim, input_dim, "Uo");
    check_mat(z_output, hidden_dim, hidden_dim, "Zo");
    check_vec(b_output, hidden_dim, "bo");
    check_mat(u_cand, hidden_dim, input_dim, "Uc");
    check_mat(z_cand, hidden_dim, hidden_dim, "Zc");
    check_vec(b_cand, hidden_dim, "bc");
    check_vec(w_readout, hidden_dim, "Wout");
    if (!std::isfinite(b_readout)) {
        throw ValidationError("bout is non-finite");
    }
}

bool LstmParams::operator==(const LstmParams& other) const {
    return input_dim == other.input_dim && hidden_dim == other.hidden_dim &&
           input_len == other.input_len && u_forget == other.u_forget &&
           z_forget == other.z_forget && b_forget == other.b_forget &&
           u_input == other.u_input && z_input == other.z_input && b_input == other.b_input &&
           u_output == other.u_output && z_output == other.z_output &&
           b_output == other.b_output && u_cand == other.u_cand && z_cand == other.z_cand &&
           b_cand == other.b_cand && w_readout == other.w_readout &&
           b_readout == other.b_readout;
}

LstmGradients LstmGradients::zero(int input_dim, int hidden_dim) {
    LstmGradients g;
    g.u_forget = Matrix::Zero(hidden_dim, input_dim);
    g.z_forget = Matrix::Zero(hidden_dim, hidden_dim);
    g.b_forget = Vector::Zero(hidden_dim);
    g.u_input = Matrix::Zero(hidden_dim, input_dim);
    g.z_input = Matrix::Zero(hidden_dim, hidden_dim);
    g.b_input = Vector::Zero(hidden_dim);
    g.u_output = Matrix::Zero(hidden_dim, input_dim);
    g.z_output = Matrix::Zero(hidden_dim, hidden_dim);
    g.b_output = Vector::Zero(hidden_dim);
    g.u_cand = Matrix::Zero(hidden_dim, input_dim);
    g.z_cand = Matrix::Zero(hidden_dim, hidden_dim);
    g.b_cand = Vector::Zero(hidden_dim);
    g.w_readout = Vector::Zero(hidden_dim);
    g.b_readout = 0.0;
    return g;
}

double LstmGradients::squared_norm() const {
    return u_forget.squaredNorm() + z_forget.squaredNorm() + b_forget.squaredNorm() +
           u_input.squaredNorm() + z_input.squaredNorm() + b_input.squaredNorm() +
           u_output.squaredNorm() + z_output.squaredNorm() + b_output.squaredNorm() +
           u_cand.squaredNorm() + z_cand.squaredNorm() + b_cand.squaredNorm() +
           w_readout.squaredNorm() + b_readout * b_readout;
}

void TrainingConfig::validate() const {
    if (epochs < 1) {
        throw ValidationError("training epochs must be >= 1");
    }
    if (!(learning_rate > 0.0)) {
        throw ValidationError("learning rate must be positive");
    }
    if (input_len < 1 || input_dim < 1 || input_dim > input_len) {
        throw ValidationError("need 1 <= input_dim <= input_len");
    }
    if (hidden_dim < 1) {
        throw ValidationError("hidden_dim must be >= 1");
    }
    if (gradient_clip && !(*gradient_clip > 0.0)) {
        throw ValidationError("gradient clip must be positive when set");
    }
}

std::pair<CellState, GateTrace> cell_forward(const LstmParams& params, const Vector& input,
                                             const CellState& prev,
                                             CandidateActivation activation) {
    if (input.size() != params.input_dim) {
        throw ValidationError("input has dimension " + std::to_string(input.size()) +
                              ", expected " + std::to_string(params.input_dim));
    }
    if (prev.hidden.size() != params.hidden_dim || prev.internal.size() != params.hidden_dim) {
        throw ValidationError("cell state dimension does not match hidden_dim");
    }
    if (!all_finite(input) || !all_finite(prev.hidden) || !all_finite(prev.internal)) {
        throw ValidationError("non-finite cell input");
    }

    GateTrace trace;
    trace.input = input;
    trace.hidden_prev = prev.hidden;
    trace.internal_prev = prev.internal;
    trace.gate_forget = logistic_vec(params.b_forget + params.u_forget * input +
                                     params.z_forget * prev.hidden);
    trace.gate_input = logistic_vec(params.b_input + params.u_input * input +
                                    params.z_input * prev.hidden);
    trace.gate_output = logistic_vec(params.b_output + params.u_output * input +
                                     params.z_output * prev.hidden);
    trace.candidate = activate_candidate(
        params.b_cand + params.u_cand * input + params.z_cand * prev.hidden, activation);
    trace.internal = trace.gate_forget.cwiseProduct(prev.internal) +
                     trace.gate_input.cwiseProduct(trace.candidate);
    trace.internal_tanh = trace.internal.array().tanh().matrix();
    trace.hidden = trace.internal_tanh.cwiseProduct(trace.gate_output);

    CellState next{trace.hidden, trace.internal};
    return {std::move(next), std::move(trace)};
}

std::pair<double, ForwardTrace> sequence_forward(const LstmParams& params,
                                                 std::span<const Vector> series,
                                                 CandidateActivation activation) {
    if (series.empty()) {
        throw ValidationError("input series is empty");
    }
    ForwardTrace trace;
    trace.steps.reserve(series.size());
    CellState state = CellState::zero(params.hidden_dim);
    for (const Vector& x : series) {
        auto [next, step] = cell_forward(params, x, state, activation);
        state = std::move(next);
        trace.steps.push_back(std::move(step));
    }
    trace.readout_pre = params.w_readout.dot(state.hidden) + params.b_readout;
    trace.prediction = logistic(trace.readout_pre);
    return {trace.prediction, std::move(trace)};
}

double loss(double prediction, double target) {
    const double d = prediction - target;
    return d * d;
}

namespace {

struct BatchGradients {
    LstmGradients grads;
    double mse{0.0};
};

void check_finite_grads(const LstmGradients& g) {
    const auto bad = [](const auto& tensor) { return !tensor.allFinite(); };
    const char* name = nullptr;
    if (bad(g.u_forget)) name = "Uf";
    else if (bad(g.z_forget)) name = "Zf";
    else if (bad(g.b_forget)) name = "bf";
    else if (bad(g.u_input)) name = "Ui";
    else if (bad(g.z_input)) name = "Zi";
    else if (bad(g.b_input)) name = "bi";
    else if (bad(g.u_output)) name = "Uo";
    else if (bad(g.z_output)) name = "Zo";
    else if (bad(g.b_output)) name = "bo";
    else if (bad(g.u_cand)) name = "Uc";
    else if (bad(g.z_cand)) name = "Zc";
    else if (bad(g.b_cand)) name = "bc";
    else if (bad(g.w_readout)) name = "Wout";
    else if (!std::isfinite(g.b_readout)) name = "bout";
    if (name != nullptr) {
        throw TrainingError(std::string("non-finite gradient in ") + name);
    }
}

BatchGradients batch_gradients(const LstmParams& params, std::span<const TrainingExample> batch,
                               CandidateActivation activation) {
    if (batch.empty()) {
        throw ValidationError("gradient batch is empty");
    }
    LstmGradients acc = LstmGradients::zero(params.input_dim, params.hidden_dim);
    double mse = 0.0;

    for (const auto& [series, target] : batch) {
        auto [prediction, trace] = sequence_forward(params, series, activation);
        mse += loss(prediction, target);

        // Readout: L = (p - y)^2, p = logistic(z), z = w . h_T + b.
        const double dl_dp = 2.0 * (prediction - target);
        const double dz = dl_dp * prediction * (1.0 - prediction);
        const Vector& h_last = trace.steps.back().hidden;
        acc.w_readout += dz * h_last;
        acc.b_readout += dz;

        Vector dh = dz * params.w_readout;
        Vector ds = Vector::Zero(params.hidden_dim);

        for (auto it = trace.steps.rbegin(); it != trace.steps.rend(); ++it) {
            const GateTrace& step = *it;
            // h = tanh(s) * g_out
            const Vector dg_out = dh.cwiseProduct(step.internal_tanh);
            ds += dh.cwiseProduct(step.gate_output)
                      .cwiseProduct(Vector::Ones(params.hidden_dim) -
                                    step.internal_tanh.cwiseProduct(step.internal_tanh));
            // s = g_f * s_prev + g_in * a
            const Vector dg_f = ds.cwiseProduct(step.internal_prev);
            const Vector dg_in = ds.cwiseProduct(step.candidate);
            const Vector da = ds.cwiseProduct(step.gate_input);
            const Vector ds_prev = ds.cwiseProduct(step.gate_forget);

            const auto sigmoid_back = [](const Vector& grad, const Vector& value) {
                return grad.cwiseProduct(value)
                    .cwiseProduct(Vector::Ones(value.size()) - value)
                    .eval();
            };
            const Vector dz_f = sigmoid_back(dg_f, step.gate_forget);
            const Vector dz_i = sigmoid_back(dg_in, step.gate_input);
            const Vector dz_o = sigmoid_back(dg_out, step.gate_output);
            Vector dz_c;
            if (activation == CandidateActivation::Tanh) {
                dz_c = da.cwiseProduct(Vector::Ones(params.hidden_dim) -
                                       step.candidate.cwiseProduct(step.candidate));
            } else {
                dz_c = sigmoid_back(da, step.candidate);
            }

            acc.u_forget += dz_f * step.input.transpose();
            acc.z_forget += dz_f * step.hidden_prev.transpose();
            acc.b_forget += dz_f;
            acc.u_input += dz_i * step.input.transpose();
            acc.z_input += dz_i * step.hidden_prev.transpose();
            acc.b_input += dz_i;
            acc.u_output += dz_o * step.input.transpose();
            acc.z_output += dz_o * step.hidden_prev.transpose();
            acc.b_output += dz_o;
            acc.u_cand += dz_c * step.input.transpose();
            acc.z_cand += dz_c * step.hidden_prev.transpose();
            acc.b_cand += dz_c;

            dh = params.z_forget.transpose() * dz_f + params.z_input.transpose() * dz_i +
                 params.z_output.transpose() * dz_o + params.z_cand.transpose() * dz_c;
            ds = ds_prev;
        }
    }

    const double inv = 1.0 / static_cast<double>(batch.size());
    acc.u_forget *= inv;
    acc.z_forget *= inv;
    acc.b_forget *= inv;
    acc.u_input *= inv;
    acc.z_input *= inv;
    acc.b_input *= inv;
    acc.u_output *= inv;
    acc.z_output *= inv;
    acc.b_output *= inv;
    acc.u_cand *= inv;
    acc.z_cand *= inv;
    acc.b_cand *= inv;
    acc.w_readout *= inv;
    acc.b_readout *= inv;
    check_finite_grads(acc);
    return {std::move(acc), mse * inv};
}

}  // namespace

LstmGradients gradients(const LstmParams& params, std::span<const TrainingExample> batch,
                        CandidateActivation activation) {
    return batch_gradients(params, batch, activation).grads;
}

TrainResult train(std::span<const TrainingExample> data, const TrainingConfig& config) {
    config.validate();
    if (data.empty()) {
        throw ValidationError("training data is empty");
    }
    for (const auto& [series, target] : data) {
        if (!(target >= 0.0 && target <= 1.0)) {
            throw ValidationError("training target outside [0, 1]");
        }
        if (series.empty()) {
            throw ValidationError("training example has an empty series");
        }
    }

    LstmParams params = LstmParams::random_init(config.input_dim, config.hidden_dim,
                                                config.input_len, config.seed);
    std::vector<double> curve;
    curve.reserve(static_cast<std::size_t>(config.epochs));

    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        BatchGradients step = batch_gradients(params, data, config.candidate);
        if (!std::isfinite(step.mse)) {
            throw TrainingError("training loss diverged", epoch);
        }
        curve.push_back(step.mse);

        double scale = config.learning_rate;
        if (config.gradient_clip) {
            const double norm = std::sqrt(step.grads.squared_norm());
            if (norm > *config.gradient_clip) {
                scale *= *config.gradient_clip / norm;
            }
        }
        params.u_forget -= scale * step.grads.u_forget;
        params.z_forget -= scale * step.grads.z_forget;
        params.b_forget -= scale * step.grads.b_forget;
        params.u_input -= scale * step.grads.u_input;
        params.z_input -= scale * step.grads.z_input;
        params.b_input -= scale * step.grads.b_input;
        params.u_output -= scale * step.grads.u_output;
        params.z_output -= scale * step.grads.z_output;
        params.b_output -= scale * step.grads.b_output;
        params.u_cand -= scale * step.grads.u_cand;
        params.z_cand -= scale * step.grads.z_cand;
        params.b_cand -= scale * step.grads.b_cand;
        params.w_readout -= scale * step.grads.w_readout;
        params.b_readout -= scale * step.grads.b_readout;
    }
    return {std::move(params), std::move(curve)};
}

std::vector<Vector> build_input_series(std::span<const double> values, int input_dim) {
    if (input_dim < 1) {
        throw ValidationError("input_dim must be >= 1");
    }
    if (std::cmp_less(values.size(), input_dim)) {
        throw InsufficientHistoryError("series of " + std::to_string(values.size()) +
                                       " values cannot fill input width " +
                                       std::to_string(input_dim));
    }
    const std::size_t steps = values.size() - static_cast<std::size_t>(input_dim) + 1;
    std::vector<Vector> series;
    series.reserve(steps);
    for (std::size_t t = 0; t < steps; ++t) {
        Vector x(input_dim);
        for (int j = 0; j < input_dim; ++j) {
            x(j) = values[t + static_cast<std::size_t>(j)];
        }
        series.push_back(std::move(x));
    }
    return series;
}

double predict_di_f(const LstmParams& params, const DemandWindow& window, TaskId task,
                    int input_len, CandidateActivation activation) {
    if (input_len < params.input_dim) {
        throw ValidationError("input_len shorter than the model's input width");
    }
    const auto recent = window.recent_values(task, static_cast<std::size_t>(input_len));
    const auto series = build_input_series(recent, params.input_dim);
    return sequence_forward(params, series, activation).first;
}

namespace {

void append_value(std::string& out, double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    out += buf;
}

void append_matrix_line(std::string& out, const char* name, const Matrix& m) {
    out += name;
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            out += ' ';
            append_value(out, m(r, c));
        }
    }
    out += '\n';
}

void append_vector_line(std::string& out, const char* name, const Vector& v) {
    out += name;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        out += ' ';
        append_value(out, v(i));
    }
    out += '\n';
}

/// Sequential reader over the serialized text, tracking byte offsets.
class Reader {
public:
    explicit Reader(const std::string& text) : text_(text) {}

    std::size_t offset() const { return pos_; }
    bool at_end() const { return pos_ >= text_.size(); }

    /// Next whitespace-delimited token on the current line; empty at EOL.
    std::string token() {
        while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t')) {
            ++pos_;
        }
        std::size_t start = pos_;
        while (pos_ < text_.size() && text_[pos_] != ' ' && text_[pos_] != '\t' &&
               text_[pos_] != '\n' && text_[pos_] != '\r') {
            ++pos_;
        }
        return text_.substr(start, pos_ - start);
    }

    void expect_eol(const char* context) {
        while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t')) {
            ++pos_;
        }
        if (pos_ < text_.size() && text_[pos_] == '\r') {
            ++pos_;
        }
        if (pos_ >= text_.size()) {
            return;  // EOF counts as end of line
        }
        if (text_[pos_] != '\n') {
            throw ParseError(std::string("trailing data after ") + context, pos_);
        }
        ++pos_;
    }

    double number(const char* context) {
        const std::size_t start = pos_;
        const std::string tok = token();
        if (tok.empty()) {
            throw ParseError(std::string("missing value in ") + context, start);
        }
        char* end = nullptr;
        const double v = std::strtod(tok.c_str(), &end);
        if (end == nullptr || *end != '\0' || !std::isfinite(v)) {
            throw ParseError(std::string("bad numeric value '") + tok + "' in " + context, start);
        }
        return v;
    }

    long integer(const char* context) {
        const std::size_t start = pos_;
        const std::string tok = token();
        char* end = nullptr;
        const long v = std::strtol(tok.c_str(), &end, 10);
        if (tok.empty() || end == nullptr || *end != '\0') {
            throw ParseError(std::string("bad integer in ") + context, start);
        }
        return v;
    }

private:
    const std::string& text_;
    std::size_t pos_{0};
};

}  // namespace

std::string save_params(const LstmParams& params) {
    params.validate();
    std::string out;
    out += "LSTM v1 " + std::to_string(params.input_dim) + ' ' +
           std::to_string(params.hidden_dim) + ' ' + std::to_string(params.input_len) + '\n';
    append_matrix_line(out, "Uf", params.u_forget);
    append_matrix_line(out, "Zf", params.z_forget);
    append_vector_line(out, "bf", params.b_forget);
    append_matrix_line(out, "Ui", params.u_input);
    append_matrix_line(out, "Zi", params.z_input);
    append_vector_line(out, "bi", params.b_input);
    append_matrix_line(out, "Uo", params.u_output);
    append_matrix_line(out, "Zo", params.z_output);
    append_vector_line(out, "bo", params.b_output);
    append_matrix_line(out, "Uc", params.u_cand);
    append_matrix_line(out, "Zc", params.z_cand);
    append_vector_line(out, "bc", params.b_cand);
    append_vector_line(out, "Wout", params.w_readout);
    out += "bout ";
    append_value(out, params.b_readout);
    out += '\n';
    return out;
}

LstmParams load_params(const std::string& text) {
    Reader reader(text);
    const std::size_t magic_at = reader.offset();
    if (reader.token() != "LSTM" || reader.token() != "v1") {
        throw ParseError("expected header 'LSTM v1'", magic_at);
    }
    const long input_dim = reader.integer("header input_dim");
    const long hidden_dim = reader.integer("header hidden_dim");
    const long input_len = reader.integer("header input_len");
    if (input_dim < 1 || hidden_dim < 1 || input_len < input_dim) {
        throw ParseError("inconsistent dimensions in header", magic_at);
    }
    reader.expect_eol("header");

    LstmParams p;
    p.input_dim = static_cast<int>(input_dim);
    p.hidden_dim = static_cast<int>(hidden_dim);
    p.input_len = static_cast<int>(input_len);

    const auto read_matrix = [&](const char* name, int rows, int cols) {
        const std::size_t at = reader.offset();
        if (reader.token() != name) {
            throw ParseError(std::string("expected tensor '") + name + "'", at);
        }
        Matrix m(rows, cols);
        for (int r = 0; r < rows; ++r) {
            for (int c = 0; c < cols; ++c) {
                m(r, c) = reader.number(name);
            }
        }
        reader.expect_eol(name);
        return m;
    };
    const auto read_vector = [&](const char* name, int n) {
        const std::size_t at = reader.offset();
        if (reader.token() != name) {
            throw ParseError(std::string("expected tensor '") + name + "'", at);
        }
        Vector v(n);
        for (int i = 0; i < n; ++i) {
            v(i) = reader.number(name);
        }
        reader.expect_eol(name);
        return v;
    };

    const int h = p.hidden_dim;
    const int d = p.input_dim;
    p.u_forget = read_matrix("Uf", h, d);
    p.z_forget = read_matrix("Zf", h, h);
    p.b_forget = read_vector("bf", h);
    p.u_input = read_matrix("Ui", h, d);
    p.z_input = read_matrix("Zi", h, h);
    p.b_input = read_vector("bi", h);
    p.u_output = read_matrix("Uo", h, d);
    p.z_output = read_matrix("Zo", h, h);
    p.b_output = read_vector("bo", h);
    p.u_cand = read_matrix("Uc", h, d);
    p.z_cand = read_matrix("Zc", h, h);
    p.b_cand = read_vector("bc", h);
    p.w_readout = read_vector("Wout", h);

    const std::size_t at = reader.offset();
    if (reader.token() != "bout") {
        throw ParseError("expected tensor 'bout'", at);
    }
    p.b_readout = reader.number("bout");
    reader.expect_eol("bout");
    if (!reader.at_end()) {
        throw ParseError("trailing data after bout", reader.offset());
    }
    return p;
}

}  // namespace edgeoffload
