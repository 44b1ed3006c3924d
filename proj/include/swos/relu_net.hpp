#pragma once

#include <string>
#include <vector>

#include "swos/stable_law.hpp"

namespace swos {

// Dense row-major matrix, sized for network weights.
struct Matrix {
  int rows = 0;
  int cols = 0;
  std::vector<double> a; // rows*cols, row-major

  Matrix() = default;
  Matrix(int r, int c) : rows(r), cols(c), a(std::size_t(r) * c, 0.0) {}
  double& operator()(int i, int j) { return a[std::size_t(i) * cols + j]; }
  double operator()(int i, int j) const { return a[std::size_t(i) * cols + j]; }

  static Matrix identity(int n);
  static Matrix column(const Vec& v); // v as a (n x 1) matrix
  Vec apply(const Vec& x) const;      // A x
  Matrix mul(const Matrix& B) const;  // A B
};

// Layer dimension vector (k_0, ..., k_{H+1}); the calculus on these vectors
// tracks exactly what the network constructors build.
struct NetDims {
  std::vector<long> k;

  int entries() const { return int(k.size()); }
  int hidden() const { return int(k.size()) - 2; }
  long input() const { return k.front(); }
  long output() const { return k.back(); }
  bool operator==(const NetDims& o) const { return k == o.k; }
};

// composition bookkeeping:  a (.) b = (b_0..b_{H2}, b_{H2+1}+a_0, a_1..a_{H1+1})
NetDims dims_compose(const NetDims& a, const NetDims& b);
// same-depth sum bookkeeping: (a_0, a_1+b_1, .., a_H+b_H, b_{H+1})
NetDims dims_sum(const NetDims& a, const NetDims& b);
// parallelization: (a_0, a_1+b_1, ..., a_{H+1}+b_{H+1})
NetDims dims_parallel(const NetDims& a, const NetDims& b);
// n-entry chain (1, 2, ..., 2, 1), n >= 3
NetDims dims_n_chain(int n);
NetDims dims_scale(const NetDims& nd, long c); // c * nd entrywise
// max layer width
long dims_norm(const NetDims& nd);
// P = sum_n k_n (k_{n-1} + 1)
long dims_param_count(const NetDims& nd);

struct Layer {
  Matrix W;
  Vec B;
};

// Approximation certificate carried by constructed nets (product, power,
// distance, sampled PWL): what was verified and on which grid.
struct Certificate {
  std::string kind;
  double delta = 0.0;            // requested sup error
  double verified_sup_err = 0.0; // measured on the verification grid
  double grid_step = 0.0;
  Vec box_lo, box_hi; // certified domain
  double lipschitz = 0.0;
  double c1 = 0.0, c2 = 0.0;           // construction parameters (per kind)
  double size_c1 = 0.0, size_c2 = 0.0; // recorded size-law constants
  bool valid = false;
};

// Explicit ReLU network ((W_1,B_1),...,(W_{H+1},B_{H+1})), H >= 1 hidden
// layers; realization is affine/ReLU chain with an affine output layer.
struct ReluNet {
  std::vector<Layer> layers;
  Certificate cert;

  int hidden() const { return int(layers.size()) - 1; }
  long input_dim() const { return layers.front().W.cols; }
  long output_dim() const { return layers.back().W.rows; }

  Vec realize(const Vec& x) const;
  double realize1(double x) const;       // scalar in, scalar out
  double realize1(const Vec& x) const;   // vector in, scalar out

  NetDims dims() const;
  long param_count() const { return dims_param_count(dims()); }

  void validate() const; // chain compatibility, H >= 1
};

// exact algebra -------------------------------------------------------------

// realize(compose(f,g)) == realize(f) o realize(g); dims = dims(f) (.) dims(g)
ReluNet compose(const ReluNet& f, const ReluNet& g);

// realize = sum h_i realize_i, equal depth/input/output; dims = ⊞-fold
ReluNet sum_nets(const std::vector<ReluNet>& nets, const std::vector<double>& h);

// realize = (f(x), g(x)), equal depth and input dim
ReluNet parallelize(const ReluNet& f, const ReluNet& g);

// realize = A f(x)
ReluNet left_matmul(const Matrix& A, const ReluNet& f);

// realize = x on R^d with H hidden layers; dims d*(1,2,...,2,1)
ReluNet identity_net(int d, int H);

// pads f to target_hidden layers without changing the realization; target
// equal to hidden(f), or hidden(f)+1 (single widened layer), or >= hidden+2
// (identity chain composition)
ReluNet depth_pad(const ReluNet& f, int target_hidden);

// affine post-map a*f + b on a scalar-output net (fused into the last layer)
ReluNet affine_output(const ReluNet& f, double a, double b);

// constant function as a (d -> 1) net with one hidden unit
ReluNet const_net(int d, double value);

// serialization: versioned JSON, bit-exact round trip for finite doubles
std::string to_json(const ReluNet& net);
ReluNet net_from_json(const std::string& text);

} // namespace swos
