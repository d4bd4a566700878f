#include "mabsa/autodiff.hpp"

#include "mabsa/errors.hpp"

#include <algorithm>
#include <cmath>

namespace mabsa::num {

namespace {

Graph* same_graph(Var a, Var b)
{
    if (!a.valid() || a.graph() != b.graph()) {
        throw ContractError("operands live on different graphs");
    }
    return a.graph();
}

void require_same_shape(const Matrix& a, const Matrix& b, const char* op)
{
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw DimensionError(std::string(op) + " shape mismatch: " + a.shape_string() + " vs " +
                             b.shape_string());
    }
}

// acc += g * b^T
void acc_matmul_nt(const Matrix& g, const Matrix& b, Matrix& acc)
{
    for (std::size_t i = 0; i < g.rows(); ++i) {
        auto grow = g.row(i);
        auto arow = acc.row(i);
        for (std::size_t k = 0; k < b.rows(); ++k) {
            auto brow = b.row(k);
            double s = 0.0;
            for (std::size_t j = 0; j < brow.size(); ++j) {
                s += grow[j] * brow[j];
            }
            arow[k] += s;
        }
    }
}

// acc += a^T * g
void acc_matmul_tn(const Matrix& a, const Matrix& g, Matrix& acc)
{
    for (std::size_t k = 0; k < a.rows(); ++k) {
        auto arow = a.row(k);
        auto grow = g.row(k);
        for (std::size_t i = 0; i < arow.size(); ++i) {
            const double aki = arow[i];
            if (aki == 0.0) {
                continue;
            }
            auto out = acc.row(i);
            for (std::size_t j = 0; j < grow.size(); ++j) {
                out[j] += aki * grow[j];
            }
        }
    }
}

} // namespace

Parameter::Parameter(std::string n, Matrix v, bool train)
  : name(std::move(n)), value(std::move(v)), grad(value.rows(), value.cols()), trainable(train)
{ }

const Matrix& Var::value() const
{
    return graph_->node(*this).value;
}

const Matrix& Var::grad() const
{
    return graph_->node(*this).adjoint;
}

double Var::scalar() const
{
    const Matrix& v = value();
    if (v.rows() != 1 || v.cols() != 1) {
        throw ContractError("scalar() on a " + v.shape_string() + " node");
    }
    return v[0];
}

Var Graph::push(Node node)
{
    nodes_.push_back(std::move(node));
    return Var(this, nodes_.size() - 1);
}

Var Graph::constant(Matrix value)
{
    Node n;
    n.kind = OpKind::Constant;
    n.value = std::move(value);
    return push(std::move(n));
}

Var Graph::param(Parameter& p)
{
    Node n;
    n.kind = OpKind::Param;
    n.value = p.value;
    n.param = &p;
    return push(std::move(n));
}

Var Graph::embedding(Parameter& table, std::span<const std::size_t> ids)
{
    const Matrix& t = table.value;
    Matrix out(ids.size(), t.cols());
    for (std::size_t r = 0; r < ids.size(); ++r) {
        if (ids[r] >= t.rows()) {
            throw ContractError("embedding id " + std::to_string(ids[r]) + " outside table of " +
                                std::to_string(t.rows()) + " rows");
        }
        std::copy_n(t.row(ids[r]).begin(), t.cols(), out.row(r).begin());
    }
    Node n;
    n.kind = OpKind::Embedding;
    n.value = std::move(out);
    n.param = &table;
    n.indices.assign(ids.begin(), ids.end());
    return push(std::move(n));
}

void Graph::backward(Var root)
{
    if (root.graph() != this) {
        throw ContractError("backward root belongs to another graph");
    }
    if (root.rows() != 1 || root.cols() != 1) {
        throw ContractError("backward requires a scalar root, got " +
                            root.value().shape_string());
    }
    for (std::size_t i = 0; i <= root.id(); ++i) {
        Node& n = nodes_[i];
        n.adjoint = Matrix(n.value.rows(), n.value.cols());
    }
    nodes_[root.id()].adjoint[0] = 1.0;
    for (std::size_t i = root.id() + 1; i-- > 0;) {
        propagate(nodes_[i]);
    }
}

void Graph::propagate(Node& n)
{
    const Matrix& g = n.adjoint;
    auto adj = [this, &n](std::size_t k) -> Matrix& { return nodes_[n.inputs[k]].adjoint; };
    auto val = [this, &n](std::size_t k) -> const Matrix& { return nodes_[n.inputs[k]].value; };

    switch (n.kind) {
    case OpKind::Constant:
        break;
    case OpKind::Param:
        n.param->grad += g;
        break;
    case OpKind::Embedding: {
        Matrix& pg = n.param->grad;
        for (std::size_t r = 0; r < n.indices.size(); ++r) {
            auto dst = pg.row(n.indices[r]);
            auto src = g.row(r);
            for (std::size_t c = 0; c < src.size(); ++c) {
                dst[c] += src[c];
            }
        }
        break;
    }
    case OpKind::MatMul:
        acc_matmul_nt(g, val(1), adj(0));
        acc_matmul_tn(val(0), g, adj(1));
        break;
    case OpKind::Transpose: {
        Matrix& a = adj(0);
        for (std::size_t r = 0; r < g.rows(); ++r) {
            for (std::size_t c = 0; c < g.cols(); ++c) {
                a(c, r) += g(r, c);
            }
        }
        break;
    }
    case OpKind::Add:
        adj(0) += g;
        adj(1) += g;
        break;
    case OpKind::Sub: {
        adj(0) += g;
        Matrix& b = adj(1);
        for (std::size_t i = 0; i < g.size(); ++i) {
            b[i] -= g[i];
        }
        break;
    }
    case OpKind::Mul: {
        Matrix& a = adj(0);
        Matrix& b = adj(1);
        const Matrix& av = val(0);
        const Matrix& bv = val(1);
        for (std::size_t i = 0; i < g.size(); ++i) {
            a[i] += g[i] * bv[i];
            b[i] += g[i] * av[i];
        }
        break;
    }
    case OpKind::Affine: {
        Matrix& a = adj(0);
        for (std::size_t i = 0; i < g.size(); ++i) {
            a[i] += n.s0 * g[i];
        }
        break;
    }
    case OpKind::AddRow: {
        adj(0) += g;
        Matrix& row = adj(1);
        for (std::size_t r = 0; r < g.rows(); ++r) {
            for (std::size_t c = 0; c < g.cols(); ++c) {
                row[c] += g(r, c);
            }
        }
        break;
    }
    case OpKind::AddCol: {
        adj(0) += g;
        Matrix& col = adj(1);
        for (std::size_t r = 0; r < g.rows(); ++r) {
            for (std::size_t c = 0; c < g.cols(); ++c) {
                col[r] += g(r, c);
            }
        }
        break;
    }
    case OpKind::MulRow: {
        Matrix& a = adj(0);
        Matrix& row = adj(1);
        const Matrix& av = val(0);
        const Matrix& rv = val(1);
        for (std::size_t r = 0; r < g.rows(); ++r) {
            for (std::size_t c = 0; c < g.cols(); ++c) {
                a(r, c) += g(r, c) * rv[c];
                row[c] += g(r, c) * av(r, c);
            }
        }
        break;
    }
    case OpKind::MulCol: {
        Matrix& a = adj(0);
        Matrix& col = adj(1);
        const Matrix& av = val(0);
        const Matrix& cv = val(1);
        for (std::size_t r = 0; r < g.rows(); ++r) {
            for (std::size_t c = 0; c < g.cols(); ++c) {
                a(r, c) += g(r, c) * cv[r];
                col[r] += g(r, c) * av(r, c);
            }
        }
        break;
    }
    case OpKind::Activation: {
        Matrix& a = adj(0);
        const Matrix& x = val(0);
        const Matrix& y = n.value;
        for (std::size_t i = 0; i < g.size(); ++i) {
            switch (n.act) {
            case Activation::Tanh:
                a[i] += g[i] * (1.0 - y[i] * y[i]);
                break;
            case Activation::Sigmoid:
                a[i] += g[i] * y[i] * (1.0 - y[i]);
                break;
            case Activation::Relu:
                a[i] += x[i] > 0.0 ? g[i] : 0.0;
                break;
            }
        }
        break;
    }
    case OpKind::SoftmaxRows: {
        Matrix& a = adj(0);
        const Matrix& y = n.value;
        for (std::size_t r = 0; r < y.rows(); ++r) {
            double s = 0.0;
            for (std::size_t c = 0; c < y.cols(); ++c) {
                s += g(r, c) * y(r, c);
            }
            for (std::size_t c = 0; c < y.cols(); ++c) {
                a(r, c) += y(r, c) * (g(r, c) - s);
            }
        }
        break;
    }
    case OpKind::LogSoftmaxRows: {
        Matrix& a = adj(0);
        const Matrix& y = n.value;
        for (std::size_t r = 0; r < y.rows(); ++r) {
            double s = 0.0;
            for (std::size_t c = 0; c < y.cols(); ++c) {
                s += g(r, c);
            }
            for (std::size_t c = 0; c < y.cols(); ++c) {
                a(r, c) += g(r, c) - std::exp(y(r, c)) * s;
            }
        }
        break;
    }
    case OpKind::ConcatRows: {
        std::size_t offset = 0;
        for (std::size_t k = 0; k < n.inputs.size(); ++k) {
            Matrix& a = adj(k);
            for (std::size_t i = 0; i < a.size(); ++i) {
                a[i] += g[offset + i];
            }
            offset += a.size();
        }
        break;
    }
    case OpKind::ConcatCols: {
        Matrix& a = adj(0);
        Matrix& b = adj(1);
        for (std::size_t r = 0; r < g.rows(); ++r) {
            for (std::size_t c = 0; c < a.cols(); ++c) {
                a(r, c) += g(r, c);
            }
            for (std::size_t c = 0; c < b.cols(); ++c) {
                b(r, c) += g(r, a.cols() + c);
            }
        }
        break;
    }
    case OpKind::SliceRows: {
        Matrix& a = adj(0);
        const std::size_t offset = n.indices[0] * a.cols();
        for (std::size_t i = 0; i < g.size(); ++i) {
            a[offset + i] += g[i];
        }
        break;
    }
    case OpKind::GatherRows: {
        Matrix& a = adj(0);
        for (std::size_t r = 0; r < n.indices.size(); ++r) {
            auto dst = a.row(n.indices[r]);
            auto src = g.row(r);
            for (std::size_t c = 0; c < src.size(); ++c) {
                dst[c] += src[c];
            }
        }
        break;
    }
    case OpKind::PickPerRow: {
        Matrix& a = adj(0);
        for (std::size_t r = 0; r < n.indices.size(); ++r) {
            a(r, n.indices[r]) += g[r];
        }
        break;
    }
    case OpKind::Sum: {
        Matrix& a = adj(0);
        for (double& v : a.data()) {
            v += g[0];
        }
        break;
    }
    case OpKind::NormalizeRows: {
        Matrix& a = adj(0);
        const Matrix& y = n.value;
        for (std::size_t r = 0; r < y.rows(); ++r) {
            double s = 0.0;
            for (std::size_t c = 0; c < y.cols(); ++c) {
                s += g(r, c) * y(r, c);
            }
            const double inv = 1.0 / n.aux[r];
            for (std::size_t c = 0; c < y.cols(); ++c) {
                a(r, c) += (g(r, c) - y(r, c) * s) * inv;
            }
        }
        break;
    }
    case OpKind::Clamp: {
        Matrix& a = adj(0);
        const Matrix& x = val(0);
        for (std::size_t i = 0; i < g.size(); ++i) {
            if (x[i] >= n.s0 && x[i] <= n.s1) {
                a[i] += g[i];
            }
        }
        break;
    }
    case OpKind::LayerNormRows: {
        Matrix& a = adj(0);
        const Matrix& y = n.value;
        const double cols = static_cast<double>(y.cols());
        for (std::size_t r = 0; r < y.rows(); ++r) {
            double mg = 0.0;
            double mgy = 0.0;
            for (std::size_t c = 0; c < y.cols(); ++c) {
                mg += g(r, c);
                mgy += g(r, c) * y(r, c);
            }
            mg /= cols;
            mgy /= cols;
            const double inv = 1.0 / n.aux[r];
            for (std::size_t c = 0; c < y.cols(); ++c) {
                a(r, c) += inv * (g(r, c) - mg - y(r, c) * mgy);
            }
        }
        break;
    }
    }
}

Var matmul(Var a, Var b)
{
    Graph* g = same_graph(a, b);
    Graph::Node n;
    n.kind = OpKind::MatMul;
    n.value = matmul(a.value(), b.value());
    n.inputs = {a.id(), b.id()};
    return g->push(std::move(n));
}

Var transpose(Var a)
{
    Graph::Node n;
    n.kind = OpKind::Transpose;
    n.value = a.value().transposed();
    n.inputs = {a.id()};
    return a.graph()->push(std::move(n));
}

Var add(Var a, Var b)
{
    Graph* g = same_graph(a, b);
    require_same_shape(a.value(), b.value(), "add");
    Graph::Node n;
    n.kind = OpKind::Add;
    n.value = a.value();
    n.value += b.value();
    n.inputs = {a.id(), b.id()};
    return g->push(std::move(n));
}

Var sub(Var a, Var b)
{
    Graph* g = same_graph(a, b);
    require_same_shape(a.value(), b.value(), "sub");
    Graph::Node n;
    n.kind = OpKind::Sub;
    n.value = a.value();
    const Matrix& bv = b.value();
    for (std::size_t i = 0; i < bv.size(); ++i) {
        n.value[i] -= bv[i];
    }
    n.inputs = {a.id(), b.id()};
    return g->push(std::move(n));
}

Var mul(Var a, Var b)
{
    Graph* g = same_graph(a, b);
    require_same_shape(a.value(), b.value(), "mul");
    Graph::Node n;
    n.kind = OpKind::Mul;
    n.value = a.value();
    const Matrix& bv = b.value();
    for (std::size_t i = 0; i < bv.size(); ++i) {
        n.value[i] *= bv[i];
    }
    n.inputs = {a.id(), b.id()};
    return g->push(std::move(n));
}

Var affine(Var a, double scale, double shift)
{
    Graph::Node n;
    n.kind = OpKind::Affine;
    n.value = a.value();
    for (double& v : n.value.data()) {
        v = scale * v + shift;
    }
    n.s0 = scale;
    n.s1 = shift;
    n.inputs = {a.id()};
    return a.graph()->push(std::move(n));
}

Var add_row(Var a, Var row)
{
    Graph* g = same_graph(a, row);
    const Matrix& rv = row.value();
    if (rv.rows() != 1 || rv.cols() != a.cols()) {
        throw DimensionError("add_row expects 1x" + std::to_string(a.cols()) + ", got " +
                             rv.shape_string());
    }
    Graph::Node n;
    n.kind = OpKind::AddRow;
    n.value = a.value();
    for (std::size_t r = 0; r < n.value.rows(); ++r) {
        for (std::size_t c = 0; c < n.value.cols(); ++c) {
            n.value(r, c) += rv[c];
        }
    }
    n.inputs = {a.id(), row.id()};
    return g->push(std::move(n));
}

Var add_col(Var a, Var col)
{
    Graph* g = same_graph(a, col);
    const Matrix& cv = col.value();
    if (cv.cols() != 1 || cv.rows() != a.rows()) {
        throw DimensionError("add_col expects " + std::to_string(a.rows()) + "x1, got " +
                             cv.shape_string());
    }
    Graph::Node n;
    n.kind = OpKind::AddCol;
    n.value = a.value();
    for (std::size_t r = 0; r < n.value.rows(); ++r) {
        for (std::size_t c = 0; c < n.value.cols(); ++c) {
            n.value(r, c) += cv[r];
        }
    }
    n.inputs = {a.id(), col.id()};
    return g->push(std::move(n));
}

Var mul_row(Var a, Var row)
{
    Graph* g = same_graph(a, row);
    const Matrix& rv = row.value();
    if (rv.rows() != 1 || rv.cols() != a.cols()) {
        throw DimensionError("mul_row expects 1x" + std::to_string(a.cols()) + ", got " +
                             rv.shape_string());
    }
    Graph::Node n;
    n.kind = OpKind::MulRow;
    n.value = a.value();
    for (std::size_t r = 0; r < n.value.rows(); ++r) {
        for (std::size_t c = 0; c < n.value.cols(); ++c) {
            n.value(r, c) *= rv[c];
        }
    }
    n.inputs = {a.id(), row.id()};
    return g->push(std::move(n));
}

Var mul_col(Var a, Var col)
{
    Graph* g = same_graph(a, col);
    const Matrix& cv = col.value();
    if (cv.cols() != 1 || cv.rows() != a.rows()) {
        throw DimensionError("mul_col expects " + std::to_string(a.rows()) + "x1, got " +
                             cv.shape_string());
    }
    Graph::Node n;
    n.kind = OpKind::MulCol;
    n.value = a.value();
    for (std::size_t r = 0; r < n.value.rows(); ++r) {
        for (std::size_t c = 0; c < n.value.cols(); ++c) {
            n.value(r, c) *= cv[r];
        }
    }
    n.inputs = {a.id(), col.id()};
    return g->push(std::move(n));
}

Var activation(Var x, Activation kind)
{
    Graph::Node n;
    n.kind = OpKind::Activation;
    n.act = kind;
    n.value = activation(x.value(), kind);
    n.inputs = {x.id()};
    return x.graph()->push(std::move(n));
}

Var softmax_rows(Var x)
{
    Graph::Node n;
    n.kind = OpKind::SoftmaxRows;
    n.value = softmax_rows(x.value());
    n.inputs = {x.id()};
    return x.graph()->push(std::move(n));
}

Var log_softmax_rows(Var x)
{
    const Matrix& xv = x.value();
    Matrix out(xv.rows(), xv.cols());
    for (std::size_t r = 0; r < xv.rows(); ++r) {
        auto in = xv.row(r);
        const double mx = *std::max_element(in.begin(), in.end());
        double total = 0.0;
        for (double v : in) {
            total += std::exp(v - mx);
        }
        const double lse = mx + std::log(total);
        for (std::size_t c = 0; c < in.size(); ++c) {
            out(r, c) = in[c] - lse;
        }
    }
    Graph::Node n;
    n.kind = OpKind::LogSoftmaxRows;
    n.value = std::move(out);
    n.inputs = {x.id()};
    return x.graph()->push(std::move(n));
}

Var concat_rows(std::span<const Var> parts)
{
    if (parts.empty()) {
        throw ContractError("concat_rows of nothing");
    }
    const std::size_t cols = parts[0].cols();
    std::size_t rows = 0;
    for (const Var& p : parts) {
        same_graph(parts[0], p);
        if (p.cols() != cols) {
            throw DimensionError("concat_rows column mismatch: " + std::to_string(cols) + " vs " +
                                 std::to_string(p.cols()));
        }
        rows += p.rows();
    }
    Graph::Node n;
    n.kind = OpKind::ConcatRows;
    n.value = Matrix(rows, cols);
    std::size_t offset = 0;
    for (const Var& p : parts) {
        const auto& d = p.value().data();
        std::copy(d.begin(), d.end(), n.value.data().begin() + static_cast<std::ptrdiff_t>(offset));
        offset += d.size();
        n.inputs.push_back(p.id());
    }
    return parts[0].graph()->push(std::move(n));
}

Var concat_cols(Var a, Var b)
{
    Graph* g = same_graph(a, b);
    if (a.rows() != b.rows()) {
        throw DimensionError("concat_cols row mismatch: " + a.value().shape_string() + " vs " +
                             b.value().shape_string());
    }
    Graph::Node n;
    n.kind = OpKind::ConcatCols;
    n.value = Matrix(a.rows(), a.cols() + b.cols());
    for (std::size_t r = 0; r < a.rows(); ++r) {
        auto dst = n.value.row(r);
        std::copy_n(a.value().row(r).begin(), a.cols(), dst.begin());
        std::copy_n(b.value().row(r).begin(), b.cols(), dst.begin() + static_cast<std::ptrdiff_t>(a.cols()));
    }
    n.inputs = {a.id(), b.id()};
    return g->push(std::move(n));
}

Var slice_rows(Var a, std::size_t begin, std::size_t count)
{
    if (begin + count > a.rows()) {
        throw DimensionError("slice_rows [" + std::to_string(begin) + ", " +
                             std::to_string(begin + count) + ") outside " +
                             a.value().shape_string());
    }
    Graph::Node n;
    n.kind = OpKind::SliceRows;
    const auto& d = a.value().data();
    const auto first = d.begin() + static_cast<std::ptrdiff_t>(begin * a.cols());
    n.value = Matrix(count, a.cols(),
                     std::vector<double>(first, first + static_cast<std::ptrdiff_t>(count * a.cols())));
    n.indices = {begin};
    n.inputs = {a.id()};
    return a.graph()->push(std::move(n));
}

Var gather_rows(Var a, std::span<const std::size_t> ids)
{
    Graph::Node n;
    n.kind = OpKind::GatherRows;
    n.value = Matrix(ids.size(), a.cols());
    for (std::size_t r = 0; r < ids.size(); ++r) {
        if (ids[r] >= a.rows()) {
            throw DimensionError("gather_rows index " + std::to_string(ids[r]) + " outside " +
                                 a.value().shape_string());
        }
        std::copy_n(a.value().row(ids[r]).begin(), a.cols(), n.value.row(r).begin());
    }
    n.indices.assign(ids.begin(), ids.end());
    n.inputs = {a.id()};
    return a.graph()->push(std::move(n));
}

Var pick_per_row(Var a, std::span<const std::size_t> ids)
{
    if (ids.size() != a.rows()) {
        throw DimensionError("pick_per_row needs one index per row of " + a.value().shape_string());
    }
    Graph::Node n;
    n.kind = OpKind::PickPerRow;
    n.value = Matrix(a.rows(), 1);
    for (std::size_t r = 0; r < ids.size(); ++r) {
        if (ids[r] >= a.cols()) {
            throw DimensionError("pick_per_row column " + std::to_string(ids[r]) + " outside " +
                                 a.value().shape_string());
        }
        n.value[r] = a.value()(r, ids[r]);
    }
    n.indices.assign(ids.begin(), ids.end());
    n.inputs = {a.id()};
    return a.graph()->push(std::move(n));
}

Var sum(Var a)
{
    double s = 0.0;
    for (double v : a.value().data()) {
        s += v;
    }
    Graph::Node n;
    n.kind = OpKind::Sum;
    n.value = Matrix(1, 1, s);
    n.inputs = {a.id()};
    return a.graph()->push(std::move(n));
}

Var normalize_rows(Var a)
{
    const Matrix& x = a.value();
    Graph::Node n;
    n.kind = OpKind::NormalizeRows;
    n.value = x;
    n.aux = Matrix(x.rows(), 1);
    for (std::size_t r = 0; r < x.rows(); ++r) {
        const double nr = norm(x.row(r));
        if (nr == 0.0) {
            throw DegenerateInputError("normalize_rows: row " + std::to_string(r) +
                                       " has zero norm");
        }
        n.aux[r] = nr;
        for (double& v : n.value.row(r)) {
            v /= nr;
        }
    }
    n.inputs = {a.id()};
    return a.graph()->push(std::move(n));
}

Var clamp(Var a, double lo, double hi)
{
    Graph::Node n;
    n.kind = OpKind::Clamp;
    n.value = a.value();
    for (double& v : n.value.data()) {
        v = std::clamp(v, lo, hi);
    }
    n.s0 = lo;
    n.s1 = hi;
    n.inputs = {a.id()};
    return a.graph()->push(std::move(n));
}

Var layer_norm_rows(Var a, double eps)
{
    const Matrix& x = a.value();
    Graph::Node n;
    n.kind = OpKind::LayerNormRows;
    n.value = Matrix(x.rows(), x.cols());
    n.aux = Matrix(x.rows(), 1);
    const double cols = static_cast<double>(x.cols());
    for (std::size_t r = 0; r < x.rows(); ++r) {
        auto in = x.row(r);
        double mean = 0.0;
        for (double v : in) {
            mean += v;
        }
        mean /= cols;
        double var = 0.0;
        for (double v : in) {
            var += (v - mean) * (v - mean);
        }
        var /= cols;
        const double sd = std::sqrt(var + eps);
        n.aux[r] = sd;
        for (std::size_t c = 0; c < in.size(); ++c) {
            n.value(r, c) = (in[c] - mean) / sd;
        }
    }
    n.inputs = {a.id()};
    return a.graph()->push(std::move(n));
}

} // namespace mabsa::num

#include "mabsa/rng.hpp"

namespace mabsa::num {

Parameter uniform_parameter(std::string name, std::size_t rows, std::size_t cols,
                            std::size_t fan_in, Rng& rng)
{
    const double bound = 1.0 / std::sqrt(static_cast<double>(std::max<std::size_t>(fan_in, 1)));
    Matrix m(rows, cols);
    for (double& v : m.data()) {
        v = rng.uniform(-bound, bound);
    }
    return Parameter(std::move(name), std::move(m));
}

} // namespace mabsa::num
