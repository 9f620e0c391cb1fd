#include "harmform/space_spec.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "harmform/tolerances.hpp"

namespace harmform {

namespace {

using json = nlohmann::json;

// coordinates of an anti-Hermitian traceless matrix in the su(n) basis
Eigen::VectorXd su_coordinates(int n, const Eigen::MatrixXcd& x) {
  std::vector<Eigen::MatrixXcd> basis = su_matrices(n);
  Eigen::VectorXd out(basis.size());
  for (size_t a = 0; a < basis.size(); ++a)
    out(static_cast<int>(a)) = -2.0 * (x * basis[a]).trace().real();
  return out;
}

Eigen::VectorXd so_coordinates(int n, const Eigen::MatrixXcd& x) {
  std::vector<Eigen::MatrixXcd> basis = so_matrices(n);
  Eigen::VectorXd out(basis.size());
  // constructor so-basis vectors have squared norm 4 under -2 Re tr
  for (size_t a = 0; a < basis.size(); ++a)
    out(static_cast<int>(a)) = -0.5 * (x * basis[a]).trace().real();
  return out;
}

Eigen::MatrixXcd place_block(const Eigen::MatrixXcd& b, int n, int position) {
  if (position < 0 || position + b.rows() > n)
    throw std::invalid_argument("embedding block does not fit the factor");
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(n, n);
  out.block(position, position, b.rows(), b.cols()) = b;
  return out;
}

}  // namespace

Eigen::MatrixXd su_block_inclusion(int k, int n,
                                   const std::vector<int>& positions) {
  std::vector<Eigen::MatrixXcd> sub = su_matrices(k);
  Eigen::MatrixXd out(n * n - 1, sub.size());
  for (size_t j = 0; j < sub.size(); ++j) {
    Eigen::MatrixXcd img = Eigen::MatrixXcd::Zero(n, n);
    for (int p : positions) img += place_block(sub[j], n, p);
    out.col(static_cast<int>(j)) = su_coordinates(n, img);
  }
  return out;
}

Eigen::MatrixXd torus_block_inclusion(int m, int n, int position) {
  if (m < 1 || m + 1 > n)
    throw std::invalid_argument("torus_block_inclusion: rank too large");
  std::vector<Eigen::MatrixXcd> sub = su_matrices(m + 1);
  Eigen::MatrixXd out(n * n - 1, m);
  for (int j = 0; j < m; ++j)  // the diagonal generators come first
    out.col(j) = su_coordinates(n, place_block(sub[j], n, position));
  return out;
}

Eigen::MatrixXd so_block_inclusion(int k, int n, int position) {
  std::vector<Eigen::MatrixXcd> sub = so_matrices(k);
  Eigen::MatrixXd out(n * (n - 1) / 2, sub.size());
  for (size_t j = 0; j < sub.size(); ++j)
    out.col(static_cast<int>(j)) =
        so_coordinates(n, place_block(sub[j], n, position));
  return out;
}

Eigen::MatrixXd so_in_su_inclusion(int k, int n, int position) {
  std::vector<Eigen::MatrixXcd> sub = so_matrices(k);
  Eigen::MatrixXd out(n * n - 1, sub.size());
  for (size_t j = 0; j < sub.size(); ++j)
    out.col(static_cast<int>(j)) =
        su_coordinates(n, place_block(sub[j], n, position));
  return out;
}

namespace {

Eigen::VectorXd vector_field(const json& j, const std::string& key) {
  if (!j.contains(key)) return Eigen::VectorXd();
  const auto& arr = j.at(key);
  if (!arr.is_array()) throw std::invalid_argument("field '" + key + "' must be an array");
  Eigen::VectorXd out(arr.size());
  for (size_t i = 0; i < arr.size(); ++i) out(static_cast<int>(i)) = arr[i].get<double>();
  return out;
}

int factor_dim(const GFactor& f) {
  if (f.type == "su") return f.n * f.n - 1;
  if (f.type == "so") return f.n * (f.n - 1) / 2;
  throw std::invalid_argument("unknown g factor type '" + f.type + "'");
}

int kblock_dim(const KBlockSpec& b) {
  if (b.type == "su") return b.n * b.n - 1;
  if (b.type == "so") return b.n * (b.n - 1) / 2;
  if (b.type == "torus") return b.n;
  throw std::invalid_argument("unknown k block type '" + b.type + "'");
}

}  // namespace

SpaceSpec parse_spec_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& err) {
    throw std::invalid_argument(std::string("spec is not valid JSON: ") +
                                err.what());
  }
  SpaceSpec spec;
  spec.schema_version = j.value("schema_version", 1);
  if (spec.schema_version != 1)
    throw std::invalid_argument("unsupported schema_version");
  spec.name = j.value("name", "space");
  if (!j.contains("g_factors") || !j.at("g_factors").is_array() ||
      j.at("g_factors").empty())
    throw std::invalid_argument("field 'g_factors' must be a nonempty array");
  for (const auto& f : j.at("g_factors"))
    spec.g_factors.push_back({f.at("type").get<std::string>(),
                              f.at("n").get<int>()});
  if (j.contains("k_blocks"))
    for (const auto& b : j.at("k_blocks")) {
      KBlockSpec kb{b.at("type").get<std::string>(), 0};
      kb.n = b.contains("n") ? b.at("n").get<int>() : b.at("dim").get<int>();
      spec.k_blocks.push_back(kb);
    }
  if (!spec.k_blocks.empty()) {
    if (!j.contains("embedding"))
      throw std::invalid_argument("field 'embedding' required when k_blocks present");
    const auto& emb = j.at("embedding");
    if (emb.size() != spec.g_factors.size())
      throw std::invalid_argument("embedding must have one row per g factor");
    for (size_t i = 0; i < emb.size(); ++i) {
      if (emb[i].size() != spec.k_blocks.size())
        throw std::invalid_argument(
            "embedding row " + std::to_string(i) +
            " must have one entry per k block");
      std::vector<EmbedDescriptor> row;
      for (size_t jj = 0; jj < emb[i].size(); ++jj) {
        const auto& d = emb[i][jj];
        EmbedDescriptor e;
        if (d.is_string()) {
          e.kind = d.get<std::string>();
          if (e.kind != "zero")
            throw std::invalid_argument("string descriptor must be \"zero\"");
        } else {
          e.kind = d.at("kind").get<std::string>();
          if (e.kind == "block") {
            for (const auto& p : d.at("positions")) e.positions.push_back(p.get<int>());
            if (e.positions.empty())
              throw std::invalid_argument("block descriptor needs positions");
          } else if (e.kind == "matrix") {
            const auto& rows = d.at("matrix");
            e.matrix.resize(rows.size(), rows.empty() ? 0 : rows[0].size());
            for (size_t r = 0; r < rows.size(); ++r)
              for (size_t c = 0; c < rows[r].size(); ++c)
                e.matrix(static_cast<int>(r), static_cast<int>(c)) =
                    rows[r][c].get<double>();
          } else if (e.kind != "zero") {
            throw std::invalid_argument("embedding kind must be zero|block|matrix");
          }
        }
        row.push_back(std::move(e));
      }
      spec.embedding.push_back(std::move(row));
    }
  }
  spec.z = vector_field(j, "z");
  spec.x = vector_field(j, "x");
  spec.y = vector_field(j, "y");
  return spec;
}

SpaceSpec parse_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open spec file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_spec_text(ss.str());
}

std::string spec_to_json(const SpaceSpec& spec) {
  json j;
  j["schema_version"] = spec.schema_version;
  j["name"] = spec.name;
  for (const auto& f : spec.g_factors)
    j["g_factors"].push_back({{"type", f.type}, {"n", f.n}});
  j["k_blocks"] = json::array();
  for (const auto& b : spec.k_blocks)
    j["k_blocks"].push_back({{"type", b.type}, {"n", b.n}});
  j["embedding"] = json::array();
  for (const auto& row : spec.embedding) {
    json jrow = json::array();
    for (const auto& e : row) {
      if (e.kind == "zero") {
        jrow.push_back("zero");
      } else if (e.kind == "block") {
        jrow.push_back({{"kind", "block"}, {"positions", e.positions}});
      } else {
        json m = json::array();
        for (int r = 0; r < e.matrix.rows(); ++r) {
          json mr = json::array();
          for (int c = 0; c < e.matrix.cols(); ++c) mr.push_back(e.matrix(r, c));
          m.push_back(mr);
        }
        jrow.push_back({{"kind", "matrix"}, {"matrix", m}});
      }
    }
    j["embedding"].push_back(jrow);
  }
  auto put_vec = [&](const char* key, const Eigen::VectorXd& v) {
    if (v.size() == 0) return;
    json arr = json::array();
    for (int i = 0; i < v.size(); ++i) arr.push_back(v(i));
    j[key] = arr;
  };
  put_vec("z", spec.z);
  put_vec("x", spec.x);
  put_vec("y", spec.y);
  return j.dump(2);
}

BuiltSpace build_space(const SpaceSpec& spec) {
  std::vector<LieAlgebra> factors;
  for (const auto& f : spec.g_factors) {
    if (f.type == "su")
      factors.push_back(su(f.n));
    else if (f.type == "so")
      factors.push_back(so(f.n));
    else
      throw std::invalid_argument("unknown g factor type '" + f.type + "'");
  }
  BuiltSpace out;
  out.g = std::make_shared<LieAlgebra>(
      factors.size() == 1 ? factors[0] : direct_sum(factors));

  const int s = static_cast<int>(spec.g_factors.size());
  out.z = spec.z.size() ? spec.z : Eigen::VectorXd::Ones(s);
  if (out.z.size() != s || out.z.minCoeff() <= 0.0)
    throw std::invalid_argument("z must hold one positive entry per g factor");

  if (spec.k_blocks.empty()) {
    out.embedding = std::make_shared<Embedding>(Embedding::trivial(out.g));
    return out;
  }

  // sub-algebra: torus blocks first (the center), then the simple blocks
  std::vector<LieAlgebra> kparts;
  std::vector<int> block_order;  // original index per part
  for (size_t b = 0; b < spec.k_blocks.size(); ++b)
    if (spec.k_blocks[b].type == "torus") {
      kparts.push_back(abelian(spec.k_blocks[b].n));
      block_order.push_back(static_cast<int>(b));
    }
  for (size_t b = 0; b < spec.k_blocks.size(); ++b) {
    const auto& kb = spec.k_blocks[b];
    if (kb.type == "torus") continue;
    kparts.push_back(kb.type == "su" ? su(kb.n) : so(kb.n));
    block_order.push_back(static_cast<int>(b));
  }
  LieAlgebra sub = kparts.size() == 1 ? kparts[0] : direct_sum(kparts);

  Eigen::MatrixXd inc = Eigen::MatrixXd::Zero(out.g->dim(), sub.dim());
  int col = 0, grow = 0;
  std::vector<int> factor_offset(s);
  for (int i = 0; i < s; ++i) {
    factor_offset[i] = grow;
    grow += factor_dim(spec.g_factors[i]);
  }
  for (size_t part = 0; part < kparts.size(); ++part) {
    const int b = block_order[part];
    const KBlockSpec& kb = spec.k_blocks[b];
    const int dim_b = kblock_dim(kb);
    for (int i = 0; i < s; ++i) {
      if (spec.embedding.empty()) break;
      const EmbedDescriptor& d = spec.embedding[i][b];
      const GFactor& gf = spec.g_factors[i];
      Eigen::MatrixXd piece;
      if (d.kind == "zero") continue;
      if (d.kind == "matrix") {
        if (d.matrix.rows() != factor_dim(gf) || d.matrix.cols() != dim_b)
          throw std::invalid_argument(
              "embedding matrix for factor " + std::to_string(i + 1) +
              ", block " + std::to_string(b + 1) + " has wrong shape");
        piece = d.matrix;
      } else {  // block
        if (gf.type == "su" && kb.type == "su")
          piece = su_block_inclusion(kb.n, gf.n, d.positions);
        else if (gf.type == "su" && kb.type == "torus")
          piece = torus_block_inclusion(kb.n, gf.n, d.positions.at(0));
        else if (gf.type == "su" && kb.type == "so")
          piece = so_in_su_inclusion(kb.n, gf.n, d.positions.at(0));
        else if (gf.type == "so" && kb.type == "so")
          piece = so_block_inclusion(kb.n, gf.n, d.positions.at(0));
        else
          throw std::invalid_argument(
              "no block rule for k type '" + kb.type + "' in g type '" +
              gf.type + "'");
      }
      inc.block(factor_offset[i], col, piece.rows(), dim_b) = piece;
    }
    col += dim_b;
  }
  out.embedding =
      std::make_shared<Embedding>(out.g, std::move(sub), std::move(inc));
  const int dim_p = out.g->dim() - out.embedding->sub_dim();
  if (dim_p > 24)
    throw std::invalid_argument("dim p = " + std::to_string(dim_p) +
                                " exceeds the supported bound 24");
  return out;
}

}  // namespace harmform
