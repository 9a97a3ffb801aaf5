#include "eclipse/autodiff.h"

#include <cmath>

namespace eclipse::ad {

// ---------------------------------------------------------------------------
// ParameterStore
// ---------------------------------------------------------------------------

size_t ParameterStore::registerArray(const std::string& name, ParamGroup group,
                                     std::vector<int64_t> shape) {
    size_t count = 1;
    for (int64_t d : shape) {
        ECLIPSE_REQUIRE(d > 0, "array dims must be positive");
        count *= static_cast<size_t>(d);
    }
    ArrayInfo info;
    info.name = name;
    info.group = group;
    info.shape = std::move(shape);
    info.offset = values_.size();
    info.count = count;
    arrays_.push_back(std::move(info));
    values_.resize(values_.size() + count, 0.0);
    return arrays_.size() - 1;
}

const ParameterStore::ArrayInfo* ParameterStore::findArray(const std::string& name) const {
    for (const auto& a : arrays_)
        if (a.name == name) return &a;
    return nullptr;
}

ParamGroup ParameterStore::groupOf(size_t slot) const {
    for (const auto& a : arrays_)
        if (slot >= a.offset && slot < a.offset + a.count) return a.group;
    throw ContractError("groupOf: slot out of range");
}

// ---------------------------------------------------------------------------
// Tape
// ---------------------------------------------------------------------------

void Tape::clear() {
    nodes_.clear();
    edges_.clear();
}

int32_t Tape::pushNode(double data, Op op, uint32_t edgeBegin, uint32_t edgeCount) {
    nodes_.push_back(Node{data, 0.0, edgeBegin, edgeCount, op});
    return static_cast<int32_t>(nodes_.size()) - 1;
}

bool Tape::pushEdge(const Value& v, double partial) {
    if (v.node_ >= 0) {
        edges_.push_back(Edge{v.node_, partial});
        return true;
    }
    if (v.pslot_ >= 0) {
        edges_.push_back(Edge{detail::encodeParam(static_cast<size_t>(v.pslot_)), partial});
        return true;
    }
    return false;  // constant
}

Value Tape::wrap(double data, Op op,
                 std::initializer_list<std::pair<const Value*, double>> parents) {
    uint32_t begin = static_cast<uint32_t>(edges_.size());
    uint32_t count = 0;
    for (const auto& [v, partial] : parents)
        if (pushEdge(*v, partial)) ++count;
    if (count == 0) {
        edges_.resize(begin);
        Value out(data);
        return out;
    }
    Value out;
    out.tape_ = this;
    out.node_ = pushNode(data, op, begin, count);
    out.data_ = data;
    return out;
}

Value Tape::input(double v) {
    Value out;
    out.tape_ = this;
    out.node_ = pushNode(v, Op::Input, static_cast<uint32_t>(edges_.size()), 0);
    out.data_ = v;
    return out;
}

Value Tape::param(const ParameterStore& store, size_t slot) {
    ECLIPSE_REQUIRE(slot < store.size(), "param slot out of range");
    Value out;
    out.tape_ = this;
    out.pslot_ = static_cast<int32_t>(slot);
    out.data_ = store.value(slot);
    return out;
}

Value Tape::param(const ParameterStore& store, size_t arrayHandle, size_t index) {
    const auto& info = store.arrayInfo(arrayHandle);
    ECLIPSE_REQUIRE(index < info.count, "param index out of range");
    return param(store, info.offset + index);
}

Value Tape::dotParams(const ParameterStore& store, size_t base,
                      std::span<const double> coeffs) {
    uint32_t begin = static_cast<uint32_t>(edges_.size());
    double acc = 0;
    for (size_t i = 0; i < coeffs.size(); ++i) {
        acc += store.value(base + i) * coeffs[i];
        edges_.push_back(Edge{detail::encodeParam(base + i), coeffs[i]});
    }
    Value out;
    out.tape_ = this;
    out.node_ = pushNode(acc, Op::Dot, begin, static_cast<uint32_t>(coeffs.size()));
    out.data_ = acc;
    return out;
}

Value Tape::dotParamsIndexed(const ParameterStore& store, std::span<const size_t> slots,
                             std::span<const double> coeffs) {
    ECLIPSE_REQUIRE(slots.size() == coeffs.size(), "dotParamsIndexed: size mismatch");
    uint32_t begin = static_cast<uint32_t>(edges_.size());
    double acc = 0;
    for (size_t i = 0; i < slots.size(); ++i) {
        acc += store.value(slots[i]) * coeffs[i];
        edges_.push_back(Edge{detail::encodeParam(slots[i]), coeffs[i]});
    }
    Value out;
    out.tape_ = this;
    out.node_ = pushNode(acc, Op::Dot, begin, static_cast<uint32_t>(slots.size()));
    out.data_ = acc;
    return out;
}

Value Tape::weightedSum(std::span<const Value> xs, std::span<const double> coeffs) {
    ECLIPSE_REQUIRE(xs.size() == coeffs.size(), "weightedSum: size mismatch");
    uint32_t begin = static_cast<uint32_t>(edges_.size());
    uint32_t count = 0;
    double acc = 0;
    for (size_t i = 0; i < xs.size(); ++i) {
        acc += xs[i].data() * coeffs[i];
        if (pushEdge(xs[i], coeffs[i])) ++count;
    }
    if (count == 0) {
        edges_.resize(begin);
        return Value(acc);
    }
    Value out;
    out.tape_ = this;
    out.node_ = pushNode(acc, Op::Sum, begin, count);
    out.data_ = acc;
    return out;
}

Value Tape::affineParams(const ParameterStore& store, size_t wBase,
                         std::span<const Value> inputs, size_t biasSlot) {
    uint32_t begin = static_cast<uint32_t>(edges_.size());
    uint32_t count = 0;
    double acc = 0;
    for (size_t i = 0; i < inputs.size(); ++i) {
        const double w = store.value(wBase + i);
        const double x = inputs[i].data();
        acc += w * x;
        edges_.push_back(Edge{detail::encodeParam(wBase + i), x});
        ++count;
        if (pushEdge(inputs[i], w)) ++count;
    }
    if (biasSlot != npos) {
        acc += store.value(biasSlot);
        edges_.push_back(Edge{detail::encodeParam(biasSlot), 1.0});
        ++count;
    }
    Value out;
    out.tape_ = this;
    out.node_ = pushNode(acc, Op::Affine, begin, count);
    out.data_ = acc;
    return out;
}

Value Tape::sum(std::span<const Value> xs) {
    uint32_t begin = static_cast<uint32_t>(edges_.size());
    uint32_t count = 0;
    double acc = 0;
    for (const Value& x : xs) {
        acc += x.data();
        if (pushEdge(x, 1.0)) ++count;
    }
    if (count == 0) {
        edges_.resize(begin);
        return Value(acc);
    }
    Value out;
    out.tape_ = this;
    out.node_ = pushNode(acc, Op::Sum, begin, count);
    out.data_ = acc;
    return out;
}

Value Tape::dot(std::span<const Value> a, std::span<const Value> b) {
    ECLIPSE_REQUIRE(a.size() == b.size(), "dot: size mismatch");
    uint32_t begin = static_cast<uint32_t>(edges_.size());
    uint32_t count = 0;
    double acc = 0;
    for (size_t i = 0; i < a.size(); ++i) {
        acc += a[i].data() * b[i].data();
        if (pushEdge(a[i], b[i].data())) ++count;
        if (pushEdge(b[i], a[i].data())) ++count;
    }
    if (count == 0) {
        edges_.resize(begin);
        return Value(acc);
    }
    Value out;
    out.tape_ = this;
    out.node_ = pushNode(acc, Op::Dot, begin, count);
    out.data_ = acc;
    return out;
}

Value Tape::add(const Value& a, const Value& b) {
    return wrap(a.data() + b.data(), Op::Add, {{&a, 1.0}, {&b, 1.0}});
}
Value Tape::sub(const Value& a, const Value& b) {
    return wrap(a.data() - b.data(), Op::Sub, {{&a, 1.0}, {&b, -1.0}});
}
Value Tape::mul(const Value& a, const Value& b) {
    return wrap(a.data() * b.data(), Op::Mul, {{&a, b.data()}, {&b, a.data()}});
}
Value Tape::div(const Value& a, const Value& b) {
    const double inv = 1.0 / b.data();
    return wrap(a.data() * inv, Op::Div, {{&a, inv}, {&b, -a.data() * inv * inv}});
}
Value Tape::neg(const Value& a) { return wrap(-a.data(), Op::Neg, {{&a, -1.0}}); }
Value Tape::expOp(const Value& a) {
    const double e = std::exp(a.data());
    return wrap(e, Op::Exp, {{&a, e}});
}
Value Tape::logOp(const Value& a) {
    return wrap(std::log(a.data()), Op::Log, {{&a, 1.0 / a.data()}});
}
Value Tape::sqrtOp(const Value& a) {
    const double s = std::sqrt(a.data());
    return wrap(s, Op::Sqrt, {{&a, 0.5 / s}});
}
Value Tape::sinOp(const Value& a) {
    return wrap(std::sin(a.data()), Op::Sin, {{&a, std::cos(a.data())}});
}
Value Tape::cosOp(const Value& a) {
    return wrap(std::cos(a.data()), Op::Cos, {{&a, -std::sin(a.data())}});
}
Value Tape::sigmoidOp(const Value& a) {
    const double s = 1.0 / (1.0 + std::exp(-a.data()));
    return wrap(s, Op::Sigmoid, {{&a, s * (1.0 - s)}});
}
Value Tape::reluOp(const Value& a) {
    const bool pos = a.data() > 0;
    return wrap(pos ? a.data() : 0.0, Op::Relu, {{&a, pos ? 1.0 : 0.0}});
}
Value Tape::maxConst(const Value& a, double c) {
    const bool keep = a.data() > c;
    return wrap(keep ? a.data() : c, Op::MaxConst, {{&a, keep ? 1.0 : 0.0}});
}
Value Tape::powi(const Value& a, int n) {
    double p1 = 1.0;
    for (int i = 0; i < n - 1; ++i) p1 *= a.data();
    return wrap(p1 * a.data(), Op::Powi, {{&a, n * p1}});
}

void Tape::backward(const Value& root, GradientMap* grads) {
    ECLIPSE_REQUIRE(root.tape_ == this || root.isConst(), "backward: value from another tape");
    for (Node& n : nodes_) n.adjoint = 0;
    if (root.isConst()) return;
    if (root.isParamRef()) {
        if (grads) (*grads)[static_cast<size_t>(root.pslot_)] += 1.0;
        return;
    }
    nodes_[root.node_].adjoint = 1.0;
    for (int32_t i = root.node_; i >= 0; --i) {
        const Node& n = nodes_[i];
        const double a = n.adjoint;
        if (a == 0) continue;
        const Edge* e = edges_.data() + n.edgeBegin;
        for (uint32_t k = 0; k < n.edgeCount; ++k, ++e) {
            if (detail::isParam(e->parent)) {
                if (grads) (*grads)[detail::paramSlot(e->parent)] += a * e->partial;
            } else {
                nodes_[e->parent].adjoint += a * e->partial;
            }
        }
    }
}

double Tape::adjoint(const Value& v) const {
    if (v.node_ < 0) return 0.0;
    return nodes_[v.node_].adjoint;
}

// ---------------------------------------------------------------------------
// Free-function sugar
// ---------------------------------------------------------------------------

namespace {
Tape* tapeOf(const Value& a, const Value& b) {
    return a.tape() ? a.tape() : b.tape();
}
}  // namespace

Value operator+(const Value& a, const Value& b) {
    Tape* t = tapeOf(a, b);
    if (!t) return Value(a.data() + b.data());
    return t->add(a, b);
}
Value operator-(const Value& a, const Value& b) {
    Tape* t = tapeOf(a, b);
    if (!t) return Value(a.data() - b.data());
    return t->sub(a, b);
}
Value operator*(const Value& a, const Value& b) {
    Tape* t = tapeOf(a, b);
    if (!t) return Value(a.data() * b.data());
    return t->mul(a, b);
}
Value operator/(const Value& a, const Value& b) {
    Tape* t = tapeOf(a, b);
    if (!t) return Value(a.data() / b.data());
    return t->div(a, b);
}
Value operator-(const Value& a) {
    Tape* t = tapeOf(a, a);
    if (!t) return Value(-a.data());
    return t->neg(a);
}

#define ECLIPSE_AD_UNARY(fn, method, dfallback)          \
    Value fn(const Value& a) {                           \
        Tape* t = tapeOf(a, a);                          \
        if (!t) return Value(dfallback(a.data()));       \
        return t->method(a);                             \
    }

namespace {
double sigmoidD(double x) { return 1.0 / (1.0 + std::exp(-x)); }
double reluD(double x) { return x > 0 ? x : 0.0; }
}  // namespace

ECLIPSE_AD_UNARY(exp, expOp, std::exp)
ECLIPSE_AD_UNARY(log, logOp, std::log)
ECLIPSE_AD_UNARY(sqrt, sqrtOp, std::sqrt)
ECLIPSE_AD_UNARY(sin, sinOp, std::sin)
ECLIPSE_AD_UNARY(cos, cosOp, std::cos)
ECLIPSE_AD_UNARY(sigmoid, sigmoidOp, sigmoidD)
ECLIPSE_AD_UNARY(relu, reluOp, reluD)
#undef ECLIPSE_AD_UNARY

Value maxWith(const Value& a, double c) {
    Tape* t = tapeOf(a, a);
    if (!t) return Value(a.data() > c ? a.data() : c);
    return t->maxConst(a, c);
}

Value powi(const Value& a, int n) {
    Tape* t = tapeOf(a, a);
    if (!t) {
        double p = 1;
        for (int i = 0; i < n; ++i) p *= a.data();
        return Value(p);
    }
    return t->powi(a, n);
}

}  // namespace eclipse::ad
