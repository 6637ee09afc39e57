#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "edgeoffload/demand_window.hpp"
#include "edgeoffload/errors.hpp"
#include "edgeoffload/types.hpp"

namespace edgeoffload {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Activation used for the cell's candidate input. The state-update equation
/// is implemented with the logistic form by default; conventional tanh is
/// available as a switch for comparison runs.
enum class CandidateActivation { Logistic, Tanh };

/// All weights of the forecaster: per gate g in {forget, input, output,
/// candidate} an input matrix U_g (hidden x input), a recurrent matrix Z_g
/// (hidden x hidden) and a bias b_g, plus a scalar readout mapping the final
/// hidden state through a logistic squash into (0, 1).
///
/// Immutable after training; inference is read-only and safe to run
/// concurrently from many threads.
struct LstmParams {
    int input_dim{0};
    int hidden_dim{0};
    int input_len{0};  // L: lagged demand values consumed per prediction

    Matrix u_forget, z_forget;
    Vector b_forget;
    Matrix u_input, z_input;
    Vector b_input;
    Matrix u_output, z_output;
    Vector b_output;
    Matrix u_cand, z_cand;
    Vector b_cand;
    Vector w_readout;
    double b_readout{0.0};

    /// Seeded small-uniform initialization in [-0.08, 0.08], forget bias +1.
    static LstmParams random_init(int input_dim, int hidden_dim, int input_len,
                                  std::uint64_t seed);

    /// Throws ValidationError if any dimension is inconsistent or any entry
    /// is non-finite.
    void validate() const;

    bool operator==(const LstmParams& other) const;
};

/// Recurrent state carried between cell steps.
struct CellState {
    Vector hidden;    // h^t
    Vector internal;  // s^t

    static CellState zero(int hidden_dim) {
        return CellState{Vector::Zero(hidden_dim), Vector::Zero(hidden_dim)};
    }
};

/// Per-step activations cached by the forward pass for backpropagation.
struct GateTrace {
    Vector input;        // x^t
    Vector hidden_prev;  // h^{t-1}
    Vector internal_prev;
    Vector gate_forget, gate_input, gate_output, candidate;
    Vector internal;    // s^t
    Vector internal_tanh;
    Vector hidden;      // h^t
};

/// Forward trace of a whole sequence plus the readout.
struct ForwardTrace {
    std::vector<GateTrace> steps;
    double readout_pre{0.0};  // w . h_last + b
    double prediction{0.0};   // logistic(readout_pre)
};

/// Gradient record, same shape as LstmParams.
struct LstmGradients {
    Matrix u_forget, z_forget;
    Vector b_forget;
    Matrix u_input, z_input;
    Vector b_input;
    Matrix u_output, z_output;
    Vector b_output;
    Matrix u_cand, z_cand;
    Vector b_cand;
    Vector w_readout;
    double b_readout{0.0};

    static LstmGradients zero(int input_dim, int hidden_dim);
    double squared_norm() const;
};

struct TrainingConfig {
    int epochs{1000};
    double learning_rate{0.05};
    int input_len{3};  // L, must satisfy 1 <= L < W when fed from a window
    int input_dim{3};
    int hidden_dim{16};
    std::uint64_t seed{1};
    std::optional<double> gradient_clip;  // global L2 norm cap, if set
    CandidateActivation candidate{CandidateActivation::Logistic};

    void validate() const;
};

/// One training example: an input series and the next-epoch demand target.
using TrainingExample = std::pair<std::vector<Vector>, double>;

/// Logistic function 1 / (1 + e^-z).
double logistic(double z);

/// One cell step:
///   g_f  = sigma(b_f + U_f x + Z_f h_prev)
///   g_in = sigma(b_in + U_in x + Z_in h_prev)
///   g_out= sigma(b_out + U_out x + Z_out h_prev)
///   a    = act(b_c + U_c x + Z_c h_prev)
///   s    = g_f * s_prev + g_in * a
///   h    = tanh(s) * g_out
/// Throws ValidationError on dimension mismatch or non-finite input.
std::pair<CellState, GateTrace> cell_forward(
    const LstmParams& params, const Vector& input, const CellState& prev,
    CandidateActivation activation = CandidateActivation::Logistic);

/// Runs the cell over the series from zero state and squashes the final
/// hidden state through the logistic readout, so the prediction lies in
/// (0, 1). Throws ValidationError on an empty series.
std::pair<double, ForwardTrace> sequence_forward(
    const LstmParams& params, std::span<const Vector> series,
    CandidateActivation activation = CandidateActivation::Logistic);

/// Squared error.
double loss(double prediction, double target);

/// Mean gradient of the squared error over the batch, by backpropagation
/// through time. Throws TrainingError naming the offending tensor if a
/// non-finite intermediate appears.
LstmGradients gradients(const LstmParams& params, std::span<const TrainingExample> batch,
                        CandidateActivation activation = CandidateActivation::Logistic);

struct TrainResult {
    LstmParams params;
    std::vector<double> loss_curve;  // batch MSE at the start of each epoch
};

/// Full-batch gradient descent from seeded initialization. Deterministic for
/// a fixed (data, config). Throws TrainingError with the epoch index if the
/// loss turns non-finite.
TrainResult train(std::span<const TrainingExample> data, const TrainingConfig& config);

/// Embeds `values` (oldest first) as a series of lagged input vectors of
/// width `input_dim`, stride 1: with values v_1..v_L the steps are
/// (v_1..v_d), (v_2..v_{d+1}), ... For the default configuration
/// (input_dim == L) this is a single vector holding the L most recent values.
std::vector<Vector> build_input_series(std::span<const double> values, int input_dim);

/// Next-epoch demand estimate for one task, from the last `input_len` values
/// of its window history. Result in (0, 1). Throws InsufficientHistoryError
/// when the window holds fewer than `input_len` values.
double predict_di_f(const LstmParams& params, const DemandWindow& window, TaskId task,
                    int input_len,
                    CandidateActivation activation = CandidateActivation::Logistic);

/// Text serialization. Line 1: `LSTM v1 <input_dim> <hidden_dim> <L>`;
/// then one line per tensor in the order Uf Zf bf Ui Zi bi Uo Zo bo
/// Uc Zc bc Wout bout, row-major, space-separated, full round-trip decimal
/// precision. load(save(p)) == p exactly.
std::string save_params(const LstmParams& params);

/// Parses the format above. Throws ParseError with the byte offset of the
/// first defect.
LstmParams load_params(const std::string& text);

}  // namespace edgeoffload
