#pragma once

#include "mabsa/matrix.hpp"

#include <cstddef>
#include <deque>
#include <span>
#include <string>
#include <vector>

namespace mabsa::num {

/// A learned tensor together with its accumulated gradient.
struct Parameter {
    Parameter() = default;
    Parameter(std::string name, Matrix value, bool trainable = true);

    void zero_grad() { grad.fill(0.0); }

    std::string name;
    Matrix value;
    Matrix grad;
    // Non-trainable parameters still appear in the forward pass but are never updated.
    bool trainable = true;
};

enum class OpKind {
    Constant,
    Param,
    Embedding,
    MatMul,
    Transpose,
    Add,
    Sub,
    Mul,
    Affine,
    AddRow,
    AddCol,
    MulRow,
    MulCol,
    Activation,
    SoftmaxRows,
    LogSoftmaxRows,
    ConcatRows,
    ConcatCols,
    SliceRows,
    GatherRows,
    PickPerRow,
    Sum,
    NormalizeRows,
    Clamp,
    LayerNormRows,
};

class Graph;

/// Handle to a node on a Graph. Cheap to copy; only valid while its graph lives.
class Var {
public:
    Var() = default;

    const Matrix& value() const;
    const Matrix& grad() const;
    std::size_t rows() const { return value().rows(); }
    std::size_t cols() const { return value().cols(); }
    double scalar() const;

    std::size_t id() const noexcept { return id_; }
    Graph* graph() const noexcept { return graph_; }
    bool valid() const noexcept { return graph_ != nullptr; }

private:
    friend class Graph;
    Var(Graph* g, std::size_t id) : graph_(g), id_(id) { }

    Graph* graph_ = nullptr;
    std::size_t id_ = 0;
};

/// Append-only tape. Nodes are created in topological order, so a reverse sweep
/// from the root visits every node after all of its consumers.
class Graph {
public:
    Graph() = default;
    Graph(const Graph&) = delete;
    Graph& operator=(const Graph&) = delete;

    Var constant(Matrix value);
    Var param(Parameter& p);
    /// Rows `ids` of an embedding table; gradient scatters back into the table.
    Var embedding(Parameter& table, std::span<const std::size_t> ids);

    /// Reverse sweep from a 1x1 root. Populates the adjoint of every node up to
    /// the root and accumulates into Parameter::grad.
    void backward(Var root);

    std::size_t size() const noexcept { return nodes_.size(); }
    OpKind kind(Var v) const { return nodes_[v.id()].kind; }

private:
    friend class Var;
    friend Var matmul(Var, Var);
    friend Var transpose(Var);
    friend Var add(Var, Var);
    friend Var sub(Var, Var);
    friend Var mul(Var, Var);
    friend Var affine(Var, double, double);
    friend Var add_row(Var, Var);
    friend Var add_col(Var, Var);
    friend Var mul_row(Var, Var);
    friend Var mul_col(Var, Var);
    friend Var activation(Var, Activation);
    friend Var softmax_rows(Var);
    friend Var log_softmax_rows(Var);
    friend Var concat_rows(std::span<const Var>);
    friend Var concat_cols(Var, Var);
    friend Var slice_rows(Var, std::size_t, std::size_t);
    friend Var gather_rows(Var, std::span<const std::size_t>);
    friend Var pick_per_row(Var, std::span<const std::size_t>);
    friend Var sum(Var);
    friend Var normalize_rows(Var);
    friend Var clamp(Var, double, double);
    friend Var layer_norm_rows(Var, double);

    struct Node {
        OpKind kind = OpKind::Constant;
        std::vector<std::size_t> inputs;
        Matrix value;
        Matrix adjoint;
        Parameter* param = nullptr;
        std::vector<std::size_t> indices;
        Matrix aux;
        double s0 = 0.0;
        double s1 = 0.0;
        Activation act = Activation::Tanh;
    };

    Var push(Node node);
    const Node& node(Var v) const { return nodes_[v.id()]; }
    void propagate(Node& n);

    // deque keeps references to node values stable while the tape grows
    std::deque<Node> nodes_;
};

// Differentiable operations. All operands must live on the same graph.
Var matmul(Var a, Var b);
Var transpose(Var a);
Var add(Var a, Var b);
Var sub(Var a, Var b);
Var mul(Var a, Var b);
/// scale * a + shift, elementwise.
Var affine(Var a, double scale, double shift);
Var add_row(Var a, Var row);
Var add_col(Var a, Var col);
Var mul_row(Var a, Var row);
Var mul_col(Var a, Var col);
Var activation(Var x, Activation kind);
Var softmax_rows(Var x);
Var log_softmax_rows(Var x);
Var concat_rows(std::span<const Var> parts);
Var concat_cols(Var a, Var b);
Var slice_rows(Var a, std::size_t begin, std::size_t count);
Var gather_rows(Var a, std::span<const std::size_t> ids);
/// out[r] = a[r, ids[r]] as an Rx1 column.
Var pick_per_row(Var a, std::span<const std::size_t> ids);
Var sum(Var a);
/// Each row scaled to unit L2 norm; a zero row raises DegenerateInputError.
Var normalize_rows(Var a);
Var clamp(Var a, double lo, double hi);
Var layer_norm_rows(Var a, double eps = 1e-5);

} // namespace mabsa::num

namespace mabsa {
class Rng;
}

namespace mabsa::num {

/// rows x cols parameter drawn uniformly from [-1/sqrt(fan_in), 1/sqrt(fan_in)].
Parameter uniform_parameter(std::string name, std::size_t rows, std::size_t cols,
                            std::size_t fan_in, Rng& rng);

} // namespace mabsa::num
