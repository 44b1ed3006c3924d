#include "swos/relu_net.hpp"

#include <cmath>

#include <nlohmann/json.hpp>

namespace swos {

Matrix Matrix::identity(int n) {
  Matrix m(n, n);
  for (int i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::column(const Vec& v) {
  Matrix m(int(v.size()), 1);
  for (int i = 0; i < int(v.size()); ++i) m(i, 0) = v[i];
  return m;
}

Vec Matrix::apply(const Vec& x) const {
  if (int(x.size()) != cols)
    throw std::invalid_argument("Matrix::apply: dimension mismatch");
  Vec y(std::size_t(rows), 0.0);
  for (int i = 0; i < rows; ++i) {
    double s = 0.0;
    const double* row = a.data() + std::size_t(i) * cols;
    for (int j = 0; j < cols; ++j) s += row[j] * x[std::size_t(j)];
    y[std::size_t(i)] = s;
  }
  return y;
}

Matrix Matrix::mul(const Matrix& B) const {
  if (cols != B.rows) throw std::invalid_argument("Matrix::mul: shape mismatch");
  Matrix out(rows, B.cols);
  for (int i = 0; i < rows; ++i)
    for (int k = 0; k < cols; ++k) {
      double v = (*this)(i, k);
      if (v == 0.0) continue;
      for (int j = 0; j < B.cols; ++j) out(i, j) += v * B(k, j);
    }
  return out;
}

NetDims dims_compose(const NetDims& a, const NetDims& b) {
  NetDims out;
  out.k.reserve(a.k.size() + b.k.size() - 1);
  for (std::size_t i = 0; i + 1 < b.k.size(); ++i) out.k.push_back(b.k[i]);
  out.k.push_back(b.k.back() + a.k.front());
  for (std::size_t i = 1; i < a.k.size(); ++i) out.k.push_back(a.k[i]);
  return out;
}

NetDims dims_sum(const NetDims& a, const NetDims& b) {
  if (a.k.size() != b.k.size())
    throw std::invalid_argument("dims_sum: unequal depths");
  NetDims out;
  out.k.resize(a.k.size());
  out.k.front() = a.k.front();
  for (std::size_t i = 1; i + 1 < a.k.size(); ++i) out.k[i] = a.k[i] + b.k[i];
  out.k.back() = b.k.back();
  return out;
}

NetDims dims_parallel(const NetDims& a, const NetDims& b) {
  if (a.k.size() != b.k.size())
    throw std::invalid_argument("dims_parallel: unequal depths");
  NetDims out;
  out.k.resize(a.k.size());
  out.k.front() = a.k.front();
  for (std::size_t i = 1; i < a.k.size(); ++i) out.k[i] = a.k[i] + b.k[i];
  return out;
}

NetDims dims_n_chain(int n) {
  if (n < 3) throw std::invalid_argument("dims_n_chain: need n >= 3");
  NetDims out;
  out.k.assign(std::size_t(n), 2);
  out.k.front() = 1;
  out.k.back() = 1;
  return out;
}

NetDims dims_scale(const NetDims& nd, long c) {
  NetDims out = nd;
  for (long& v : out.k) v *= c;
  return out;
}

long dims_norm(const NetDims& nd) {
  long m = 0;
  for (long v : nd.k) m = std::max(m, v);
  return m;
}

long dims_param_count(const NetDims& nd) {
  long p = 0;
  for (std::size_t i = 1; i < nd.k.size(); ++i) p += nd.k[i] * (nd.k[i - 1] + 1);
  return p;
}

void ReluNet::validate() const {
  if (layers.size() < 2)
    throw std::invalid_argument("ReluNet: needs at least one hidden layer");
  for (std::size_t i = 0; i < layers.size(); ++i) {
    const Layer& L = layers[i];
    if (int(L.B.size()) != L.W.rows)
      throw std::invalid_argument("ReluNet: bias size mismatch");
    if (i > 0 && layers[i - 1].W.rows != L.W.cols)
      throw std::invalid_argument("ReluNet: chain incompatibility");
  }
}

Vec ReluNet::realize(const Vec& x) const {
  if (int(x.size()) != input_dim())
    throw std::invalid_argument("ReluNet::realize: input dimension mismatch");
  Vec cur = x;
  for (std::size_t i = 0; i + 1 < layers.size(); ++i) {
    cur = layers[i].W.apply(cur);
    for (int j = 0; j < layers[i].W.rows; ++j) {
      cur[std::size_t(j)] += layers[i].B[std::size_t(j)];
      if (cur[std::size_t(j)] < 0.0) cur[std::size_t(j)] = 0.0;
    }
  }
  const Layer& out = layers.back();
  Vec y = out.W.apply(cur);
  for (int j = 0; j < out.W.rows; ++j) y[std::size_t(j)] += out.B[std::size_t(j)];
  return y;
}

double ReluNet::realize1(double x) const { return realize(Vec{x})[0]; }

double ReluNet::realize1(const Vec& x) const {
  Vec y = realize(x);
  if (y.size() != 1)
    throw std::invalid_argument("ReluNet::realize1: output is not scalar");
  return y[0];
}

NetDims ReluNet::dims() const {
  NetDims nd;
  nd.k.reserve(layers.size() + 1);
  nd.k.push_back(layers.front().W.cols);
  for (const Layer& L : layers) nd.k.push_back(L.W.rows);
  return nd;
}

ReluNet compose(const ReluNet& f, const ReluNet& g) {
  if (f.input_dim() != g.output_dim())
    throw std::invalid_argument("compose: dimension mismatch");
  ReluNet out;
  out.layers.reserve(f.layers.size() + g.layers.size());
  for (std::size_t i = 0; i + 1 < g.layers.size(); ++i)
    out.layers.push_back(g.layers[i]);
  // interface: carry the signed g output as (z+, z-), then feed f through
  // W1 [I, -I]; the dims bookkeeping matches the (.) operator exactly
  const Layer& gout = g.layers.back();
  int m = gout.W.rows;
  Layer iface;
  iface.W = Matrix(2 * m, gout.W.cols);
  iface.B.assign(std::size_t(2 * m), 0.0);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < gout.W.cols; ++j) {
      iface.W(i, j) = gout.W(i, j);
      iface.W(m + i, j) = -gout.W(i, j);
    }
    iface.B[std::size_t(i)] = gout.B[std::size_t(i)];
    iface.B[std::size_t(m + i)] = -gout.B[std::size_t(i)];
  }
  out.layers.push_back(std::move(iface));
  const Layer& f1 = f.layers.front();
  Layer first;
  first.W = Matrix(f1.W.rows, 2 * m);
  first.B = f1.B;
  for (int i = 0; i < f1.W.rows; ++i)
    for (int j = 0; j < m; ++j) {
      first.W(i, j) = f1.W(i, j);
      first.W(i, m + j) = -f1.W(i, j);
    }
  out.layers.push_back(std::move(first));
  for (std::size_t i = 1; i < f.layers.size(); ++i)
    out.layers.push_back(f.layers[i]);
  return out;
}

ReluNet sum_nets(const std::vector<ReluNet>& nets, const std::vector<double>& h) {
  if (nets.empty() || nets.size() != h.size())
    throw std::invalid_argument("sum_nets: empty input or coefficient mismatch");
  const std::size_t L = nets.front().layers.size();
  const long din = nets.front().input_dim();
  const long dout = nets.front().output_dim();
  for (const ReluNet& n : nets) {
    if (n.layers.size() != L)
      throw std::invalid_argument(
          "sum_nets: unequal depths, pad with depth_pad first");
    if (n.input_dim() != din || n.output_dim() != dout)
      throw std::invalid_argument("sum_nets: input/output dims differ");
  }
  ReluNet out;
  out.layers.resize(L);
  // hidden layers: block stack / block diagonal
  for (std::size_t l = 0; l + 1 < L; ++l) {
    long rows = 0, cols = 0;
    for (const ReluNet& n : nets) {
      rows += n.layers[l].W.rows;
      cols += n.layers[l].W.cols;
    }
    if (l == 0) cols = din;
    Layer Lr;
    Lr.W = Matrix(int(rows), int(cols));
    Lr.B.assign(std::size_t(rows), 0.0);
    long ro = 0, co = 0;
    for (const ReluNet& n : nets) {
      const Layer& src = n.layers[l];
      for (int i = 0; i < src.W.rows; ++i) {
        for (int j = 0; j < src.W.cols; ++j)
          Lr.W(int(ro) + i, int(l == 0 ? j : co + j)) = src.W(i, j);
        Lr.B[std::size_t(ro + i)] = src.B[std::size_t(i)];
      }
      ro += src.W.rows;
      co += src.W.cols;
    }
    out.layers[l] = std::move(Lr);
  }
  // output: horizontal concatenation with the coefficients folded in
  long cols = 0;
  for (const ReluNet& n : nets) cols += n.layers[L - 1].W.cols;
  Layer Lo;
  Lo.W = Matrix(int(dout), int(cols));
  Lo.B.assign(std::size_t(dout), 0.0);
  long co = 0;
  for (std::size_t ni = 0; ni < nets.size(); ++ni) {
    const Layer& src = nets[ni].layers[L - 1];
    for (int i = 0; i < src.W.rows; ++i) {
      for (int j = 0; j < src.W.cols; ++j)
        Lo.W(i, int(co) + j) = h[ni] * src.W(i, j);
      Lo.B[std::size_t(i)] += h[ni] * src.B[std::size_t(i)];
    }
    co += src.W.cols;
  }
  out.layers[L - 1] = std::move(Lo);
  return out;
}

ReluNet parallelize(const ReluNet& f, const ReluNet& g) {
  if (f.layers.size() != g.layers.size())
    throw std::invalid_argument("parallelize: unequal depths");
  if (f.input_dim() != g.input_dim())
    throw std::invalid_argument("parallelize: input dims differ");
  const std::size_t L = f.layers.size();
  ReluNet out;
  out.layers.resize(L);
  for (std::size_t l = 0; l < L; ++l) {
    const Layer& a = f.layers[l];
    const Layer& b = g.layers[l];
    int rows = a.W.rows + b.W.rows;
    int cols = (l == 0) ? a.W.cols : a.W.cols + b.W.cols;
    Layer Lr;
    Lr.W = Matrix(rows, cols);
    Lr.B.assign(std::size_t(rows), 0.0);
    for (int i = 0; i < a.W.rows; ++i) {
      for (int j = 0; j < a.W.cols; ++j) Lr.W(i, j) = a.W(i, j);
      Lr.B[std::size_t(i)] = a.B[std::size_t(i)];
    }
    int roff = a.W.rows;
    int coff = (l == 0) ? 0 : a.W.cols;
    for (int i = 0; i < b.W.rows; ++i) {
      for (int j = 0; j < b.W.cols; ++j) Lr.W(roff + i, coff + j) = b.W(i, j);
      Lr.B[std::size_t(roff + i)] = b.B[std::size_t(i)];
    }
    out.layers[l] = std::move(Lr);
  }
  return out;
}

ReluNet left_matmul(const Matrix& A, const ReluNet& f) {
  if (A.cols != f.output_dim())
    throw std::invalid_argument("left_matmul: shape mismatch");
  ReluNet out = f;
  Layer& last = out.layers.back();
  last.W = A.mul(last.W);
  last.B = A.apply(last.B);
  out.cert = Certificate{};
  return out;
}

ReluNet identity_net(int d, int H) {
  if (d < 1 || H < 1) throw std::invalid_argument("identity_net: d, H >= 1");
  ReluNet out;
  Layer first;
  first.W = Matrix(2 * d, d);
  first.B.assign(std::size_t(2 * d), 0.0);
  for (int i = 0; i < d; ++i) {
    first.W(i, i) = 1.0;
    first.W(d + i, i) = -1.0;
  }
  out.layers.push_back(std::move(first));
  for (int l = 1; l < H; ++l) {
    Layer mid;
    mid.W = Matrix::identity(2 * d);
    mid.B.assign(std::size_t(2 * d), 0.0);
    out.layers.push_back(std::move(mid));
  }
  Layer last;
  last.W = Matrix(d, 2 * d);
  last.B.assign(std::size_t(d), 0.0);
  for (int i = 0; i < d; ++i) {
    last.W(i, i) = 1.0;
    last.W(i, d + i) = -1.0;
  }
  out.layers.push_back(std::move(last));
  return out;
}

ReluNet depth_pad(const ReluNet& f, int target_hidden) {
  int H = f.hidden();
  if (target_hidden == H) return f;
  if (target_hidden < H)
    throw std::invalid_argument("depth_pad: cannot shrink depth");
  if (target_hidden == H + 1) {
    // single widened layer: last affine split into (z+, z-), then recombined
    ReluNet out = f;
    Layer last = out.layers.back();
    out.layers.pop_back();
    int m = last.W.rows;
    Layer widen;
    widen.W = Matrix(2 * m, last.W.cols);
    widen.B.assign(std::size_t(2 * m), 0.0);
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < last.W.cols; ++j) {
        widen.W(i, j) = last.W(i, j);
        widen.W(m + i, j) = -last.W(i, j);
      }
      widen.B[std::size_t(i)] = last.B[std::size_t(i)];
      widen.B[std::size_t(m + i)] = -last.B[std::size_t(i)];
    }
    Layer rec;
    rec.W = Matrix(m, 2 * m);
    rec.B.assign(std::size_t(m), 0.0);
    for (int i = 0; i < m; ++i) {
      rec.W(i, i) = 1.0;
      rec.W(i, m + i) = -1.0;
    }
    out.layers.push_back(std::move(widen));
    out.layers.push_back(std::move(rec));
    out.cert = Certificate{};
    return out;
  }
  return compose(identity_net(int(f.output_dim()), target_hidden - H - 1), f);
}

ReluNet affine_output(const ReluNet& f, double a, double b) {
  ReluNet out = f;
  Layer& last = out.layers.back();
  if (last.W.rows != 1)
    throw std::invalid_argument("affine_output: scalar output expected");
  for (double& w : last.W.a) w *= a;
  last.B[0] = a * last.B[0] + b;
  out.cert = Certificate{};
  return out;
}

ReluNet const_net(int d, double value) {
  ReluNet out;
  Layer h;
  h.W = Matrix(1, d);
  h.B.assign(1, 0.0);
  Layer o;
  o.W = Matrix(1, 1);
  o.B.assign(1, value);
  out.layers.push_back(std::move(h));
  out.layers.push_back(std::move(o));
  return out;
}

std::string to_json(const ReluNet& net) {
  nlohmann::json j;
  j["version"] = 1;
  NetDims nd = net.dims();
  j["dims"] = nd.k;
  nlohmann::json layers = nlohmann::json::array();
  for (const Layer& L : net.layers) {
    nlohmann::json lj;
    lj["W"] = L.W.a;
    lj["B"] = L.B;
    layers.push_back(std::move(lj));
  }
  j["layers"] = std::move(layers);
  if (net.cert.valid) {
    nlohmann::json c;
    c["kind"] = net.cert.kind;
    c["delta"] = net.cert.delta;
    c["verified_sup_err"] = net.cert.verified_sup_err;
    c["grid_step"] = net.cert.grid_step;
    c["domain_box"] = {{"lo", net.cert.box_lo}, {"hi", net.cert.box_hi}};
    c["lipschitz"] = net.cert.lipschitz;
    c["c1"] = net.cert.c1;
    c["c2"] = net.cert.c2;
    c["size_c1"] = net.cert.size_c1;
    c["size_c2"] = net.cert.size_c2;
    j["certificates"] = std::move(c);
  }
  return j.dump();
}

ReluNet net_from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  if (j.at("version").get<int>() != 1)
    throw std::invalid_argument("net_from_json: unsupported version");
  std::vector<long> dims = j.at("dims").get<std::vector<long>>();
  ReluNet net;
  const auto& layers = j.at("layers");
  if (layers.size() + 1 != dims.size())
    throw std::invalid_argument("net_from_json: dims/layers mismatch");
  for (std::size_t i = 0; i < layers.size(); ++i) {
    Layer L;
    L.W = Matrix(int(dims[i + 1]), int(dims[i]));
    L.W.a = layers[i].at("W").get<std::vector<double>>();
    if (long(L.W.a.size()) != dims[i + 1] * dims[i])
      throw std::invalid_argument("net_from_json: weight size mismatch");
    L.B = layers[i].at("B").get<std::vector<double>>();
    if (long(L.B.size()) != dims[i + 1])
      throw std::invalid_argument("net_from_json: bias size mismatch");
    net.layers.push_back(std::move(L));
  }
  if (j.contains("certificates")) {
    const auto& c = j.at("certificates");
    net.cert.valid = true;
    net.cert.kind = c.at("kind").get<std::string>();
    net.cert.delta = c.at("delta").get<double>();
    net.cert.verified_sup_err = c.at("verified_sup_err").get<double>();
    net.cert.grid_step = c.at("grid_step").get<double>();
    net.cert.box_lo = c.at("domain_box").at("lo").get<Vec>();
    net.cert.box_hi = c.at("domain_box").at("hi").get<Vec>();
    net.cert.lipschitz = c.at("lipschitz").get<double>();
    net.cert.c1 = c.at("c1").get<double>();
    net.cert.c2 = c.at("c2").get<double>();
    net.cert.size_c1 = c.value("size_c1", 0.0);
    net.cert.size_c2 = c.value("size_c2", 0.0);
  }
  net.validate();
  return net;
}

} // namespace swos
