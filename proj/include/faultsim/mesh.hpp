/**
 * @file mesh.hpp
 * @brief Structured hexahedral meshes with conformal, split fault surfaces.
 */
#pragma once

#include "constitutive.hpp"
#include "errors.hpp"
#include "fem.hpp"
#include "types.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <string>
#include <tuple>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace faultsim
{

struct Node
{
  Index id = 0;
  double x = 0.0, y = 0.0, z = 0.0;

  Vec3 pos() const { return {x, y, z}; }
};

struct HexElement
{
  Index id = 0;
  std::array<Index, 8> node_ids{};
  int region_id = 0;
};

struct InterfaceElement
{
  Index id = 0;
  std::array<Index, 4> face_top{};    // nodes seen by the hex on the +n_f side
  std::array<Index, 4> face_bottom{}; // nodes seen by the hex on the -n_f side
  std::array<Index, 4> orig{};        // unsplit node ids, used for adjacency
  std::array<double, 4> weights{};    // integral of each bilinear shape function
  Vec3 n_f = Vec3::Zero();
  Vec3 m1 = Vec3::Zero();
  Vec3 m2 = Vec3::Zero();
  Vec3 centroid = Vec3::Zero();
  double area = 0.0;
  int fault_id = 0;
  std::array<Index, 2> neighbor_cells{}; // (cell-, cell+)

  /// Columns (n_f, m1, m2): local-to-global rotation.
  Mat3 rotation() const
  {
    Mat3 R;
    R.col(0) = n_f;
    R.col(1) = m1;
    R.col(2) = m2;
    return R;
  }
};

/// Two interface elements of one fault sharing an edge.
struct FaultAdjacency
{
  Index a = 0;
  Index b = 0;
  double edge_length = 0.0;
};

/// A grid face selected as part of a fault, before node splitting.
struct FaultFace
{
  Index hex_minus = 0;
  Index hex_plus = 0;
  std::array<Index, 4> nodes{}; // cyclic order
  int fault_id = 0;
};

struct Mesh
{
  std::vector<Node> nodes;
  std::vector<HexElement> hexes;
  std::vector<InterfaceElement> interfaces;
  std::vector<FaultAdjacency> adjacency;
  std::map<int, ElasticMaterial> materials;
  std::vector<FaultFace> fault_faces;
  std::vector<std::string> fault_names;
  std::map<std::string, std::vector<Index>> node_sets;
  std::vector<Index> orig_node; // unsplit id of every node
  std::vector<double> grid_x, grid_y, grid_z; // reference grid lines

  Index n_nodes() const { return static_cast<Index>(nodes.size()); }
  Index n_dofs() const { return 3 * n_nodes(); }
  Index n_interfaces() const { return static_cast<Index>(interfaces.size()); }

  HexCoords hex_coords(Index h) const
  {
    HexCoords X;
    const auto &ids = hexes[h].node_ids;
    for (int a = 0; a < 8; ++a)
      X.row(a) = nodes[ids[a]].pos().transpose();
    return X;
  }

  const ElasticMaterial &material_of(Index h) const
  {
    auto it = materials.find(hexes[h].region_id);
    if (it == materials.end())
      throw InputError("no material for region " + std::to_string(hexes[h].region_id));
    return it->second;
  }

  int fault_index(const std::string &name) const
  {
    for (std::size_t i = 0; i < fault_names.size(); ++i)
      if (fault_names[i] == name)
        return static_cast<int>(i);
    throw InputError("unknown fault '" + name + "'");
  }

  std::vector<Index> fault_elements(int fault_id) const
  {
    std::vector<Index> r;
    for (const auto &ie : interfaces)
      if (ie.fault_id == fault_id)
        r.push_back(ie.id);
    return r;
  }
};

/// Planar fault given in reference (unsheared) grid coordinates.
struct FaultSurface
{
  std::string name;
  Axis normal_axis = Axis::x;
  double position = 0.0;
  // Extents along the two remaining axes, in increasing axis order.
  std::array<double, 2> lo{};
  std::array<double, 2> hi{};
  int orientation = 1; // +1: n_f points toward increasing normal coordinate
};

/// Horizontal displacement x += w(x_ref) * s(z), w a hat, s(z) = (clamp(z) - z_pivot) * slope.
struct ColumnShear
{
  double x_lo = 0.0, x_peak = 0.0, x_hi = 0.0;
  double z_lo = 0.0, z_hi = 0.0, z_pivot = 0.0;
  double slope = 0.0;

  double weight(double x) const
  {
    if (x <= x_lo || x >= x_hi)
      return x == x_peak ? 1.0 : 0.0;
    if (x <= x_peak)
      return x_peak == x_lo ? 1.0 : (x - x_lo) / (x_peak - x_lo);
    return x_hi == x_peak ? 1.0 : (x_hi - x) / (x_hi - x_peak);
  }

  double offset(double x, double z) const
  {
    const double w = weight(x);
    if (w == 0.0)
      return 0.0;
    return w * (std::clamp(z, z_lo, z_hi) - z_pivot) * slope;
  }
};

/// Axis-aligned box in reference coordinates mapped to a region tag; first match wins.
struct RegionBox
{
  Vec3 lo = Vec3::Constant(-1e300);
  Vec3 hi = Vec3::Constant(1e300);
  int region = 0;

  bool contains(const Vec3 &p) const
  {
    return (p.array() >= lo.array()).all() && (p.array() <= hi.array()).all();
  }
};

struct DomainSpec
{
  std::vector<double> x, y, z; // reference grid lines, strictly increasing
  std::vector<ColumnShear> shears;
  std::vector<FaultSurface> faults;
  std::vector<RegionBox> regions;
  int default_region = 0;
  std::map<int, ElasticMaterial> materials;
};

namespace detail
{

inline bool on_line(const std::vector<double> &g, double v, double tol = 1e-9)
{
  return std::any_of(g.begin(), g.end(),
                     [&](double a) { return std::abs(a - v) <= tol * std::max(1.0, std::abs(v)); });
}

inline Index line_index(const std::vector<double> &g, double v, double tol = 1e-9)
{
  for (std::size_t i = 0; i < g.size(); ++i)
    if (std::abs(g[i] - v) <= tol * std::max(1.0, std::abs(v)))
      return static_cast<Index>(i);
  return -1;
}

struct UnionFind
{
  std::vector<int> p;
  explicit UnionFind(int n) : p(n) { std::iota(p.begin(), p.end(), 0); }
  int find(int a)
  {
    while (p[a] != a)
      a = p[a] = p[p[a]];
    return a;
  }
  void unite(int a, int b)
  {
    a = find(a);
    b = find(b);
    if (a != b)
      p[std::max(a, b)] = std::min(a, b);
  }
};

inline std::array<Index, 4> sorted4(std::array<Index, 4> a)
{
  std::sort(a.begin(), a.end());
  return a;
}

struct Key4Hash
{
  std::size_t operator()(const std::array<Index, 4> &k) const
  {
    std::size_t h = 1469598103934665603ull;
    for (Index v : k)
      h = (h ^ static_cast<std::size_t>(v)) * 1099511628211ull;
    return h;
  }
};

} // namespace detail

/// Grading of one axis: cells of size h_fine inside [fine_lo, fine_hi], growing
/// geometrically by at most `ratio` per cell outside; every breakpoint is a grid line.
inline std::vector<double> graded_axis(std::vector<double> breakpoints, double fine_lo, double fine_hi,
                                       double h_fine, double ratio = 1.4, double ratio_max = 1.5)
{
  std::sort(breakpoints.begin(), breakpoints.end());
  breakpoints.erase(std::unique(breakpoints.begin(), breakpoints.end()), breakpoints.end());
  if (breakpoints.size() < 2 || !(h_fine > 0.0) || !(ratio > 1.0))
    throw InputError("graded_axis: invalid arguments");

  auto h = [&](double x) {
    const double d = x < fine_lo ? fine_lo - x : (x > fine_hi ? x - fine_hi : 0.0);
    return h_fine + (ratio - 1.0) * d;
  };

  const std::size_t nseg = breakpoints.size() - 1;
  constexpr int samples = 4096;
  std::vector<std::vector<double>> phi(nseg);
  std::vector<int> count(nseg);
  for (std::size_t s = 0; s < nseg; ++s)
  {
    const double a = breakpoints[s], b = breakpoints[s + 1];
    phi[s].assign(samples + 1, 0.0);
    const double dx = (b - a) / samples;
    for (int i = 1; i <= samples; ++i)
    {
      const double x0 = a + (i - 1) * dx, x1 = a + i * dx;
      phi[s][i] = phi[s][i - 1] + 0.5 * dx * (1.0 / h(x0) + 1.0 / h(x1));
    }
    count[s] = std::max(1, static_cast<int>(std::ceil(phi[s][samples] - 1e-9)));
  }

  auto place = [&]() {
    std::vector<double> g{breakpoints.front()};
    for (std::size_t s = 0; s < nseg; ++s)
    {
      const double a = breakpoints[s], b = breakpoints[s + 1];
      const double total = phi[s][samples];
      const double dx = (b - a) / samples;
      int j = 0;
      for (int k = 1; k < count[s]; ++k)
      {
        const double target = total * k / count[s];
        while (j < samples && phi[s][j + 1] < target)
          ++j;
        const double f = (target - phi[s][j]) / (phi[s][j + 1] - phi[s][j]);
        g.push_back(a + (j + f) * dx);
      }
      g.push_back(b);
    }
    return g;
  };

  auto segment_of = [&](double mid) {
    for (std::size_t s = 0; s < nseg; ++s)
      if (mid >= breakpoints[s] && mid <= breakpoints[s + 1])
        return s;
    return nseg - 1;
  };

  std::vector<double> g = place();
  for (int iter = 0; iter < 10000; ++iter)
  {
    bool changed = false;
    for (std::size_t i = 0; i + 2 < g.size(); ++i)
    {
      const double h0 = g[i + 1] - g[i], h1 = g[i + 2] - g[i + 1];
      if (std::max(h0, h1) > ratio_max * std::min(h0, h1) * (1.0 + 1e-12))
      {
        const double mid = h0 > h1 ? 0.5 * (g[i] + g[i + 1]) : 0.5 * (g[i + 1] + g[i + 2]);
        ++count[segment_of(mid)];
        changed = true;
        break;
      }
    }
    if (!changed)
      return g;
    g = place();
  }
  throw InputError("graded_axis: grading ratio could not be enforced");
}

/// Mirror a half axis [0, L] to a symmetric axis [-L, L] with exactly opposite lines.
inline std::vector<double> mirror_axis(const std::vector<double> &half)
{
  std::vector<double> g;
  for (auto it = half.rbegin(); it != half.rend(); ++it)
    if (*it != 0.0)
      g.push_back(-*it);
  g.insert(g.end(), half.begin(), half.end());
  return g;
}

/// Orthonormal right-handed frame (n_f, m1, m2); m2 is the up-dip direction.
inline std::array<Vec3, 3> local_frame(const Vec3 &normal)
{
  const double len = normal.norm();
  if (!(len > 0.0) || !std::isfinite(len))
    throw GeometryError("degenerate interface normal");
  const Vec3 n = normal / len;
  Vec3 m2 = Vec3::UnitZ() - n.z() * n;
  if (m2.norm() < 1e-8)
    m2 = Vec3::UnitY() - n.y() * n;
  m2.normalize();
  const Vec3 m1 = m2.cross(n).normalized();
  return {n, m1, m2};
}

inline std::array<Vec3, 3> local_frame(const InterfaceElement &ie)
{
  if (!(ie.area > 0.0))
    throw GeometryError("degenerate interface element (zero area)");
  return local_frame(ie.n_f);
}

/// Hexahedral grid with fault faces recorded but nodes not yet split.
inline Mesh build_grid(const DomainSpec &spec)
{
  const auto &gx = spec.x, &gy = spec.y, &gz = spec.z;
  for (const auto *g : {&gx, &gy, &gz})
  {
    if (g->size() < 2)
      throw InputError("grid axis needs at least two lines");
    for (std::size_t i = 1; i < g->size(); ++i)
      if (!((*g)[i] > (*g)[i - 1]))
        throw InputError("grid lines must be strictly increasing");
  }
  const Index nx = static_cast<Index>(gx.size()), ny = static_cast<Index>(gy.size()),
              nz = static_cast<Index>(gz.size());
  const Index cx = nx - 1, cy = ny - 1, cz = nz - 1;
  auto nid = [&](Index i, Index j, Index k) { return i + nx * (j + ny * k); };
  auto hid = [&](Index i, Index j, Index k) { return i + cx * (j + cy * k); };

  Mesh m;
  m.grid_x = gx;
  m.grid_y = gy;
  m.grid_z = gz;
  m.materials = spec.materials;
  m.nodes.resize(nx * ny * nz);
  for (Index k = 0; k < nz; ++k)
    for (Index j = 0; j < ny; ++j)
      for (Index i = 0; i < nx; ++i)
      {
        const Index id = nid(i, j, k);
        double x = gx[i];
        for (const auto &s : spec.shears)
          x += s.offset(gx[i], gz[k]);
        m.nodes[id] = {id, x, gy[j], gz[k]};
      }
  m.orig_node.resize(m.nodes.size());
  std::iota(m.orig_node.begin(), m.orig_node.end(), Index{0});

  m.hexes.resize(cx * cy * cz);
  for (Index k = 0; k < cz; ++k)
    for (Index j = 0; j < cy; ++j)
      for (Index i = 0; i < cx; ++i)
      {
        HexElement h;
        h.id = hid(i, j, k);
        for (int a = 0; a < 8; ++a)
        {
          const auto &c = hex_corners[a];
          h.node_ids[a] = nid(i + c[0], j + c[1], k + c[2]);
        }
        const Vec3 ref(0.5 * (gx[i] + gx[i + 1]), 0.5 * (gy[j] + gy[j + 1]), 0.5 * (gz[k] + gz[k + 1]));
        h.region_id = spec.default_region;
        for (const auto &r : spec.regions)
          if (r.contains(ref))
          {
            h.region_id = r.region;
            break;
          }
        m.hexes[h.id] = h;
      }

  for (Index h = 0; h < static_cast<Index>(m.hexes.size()); ++h)
    if (!(hex_min_jacobian(m.hex_coords(h)) > 0.0))
      throw MeshError("hexahedron " + std::to_string(h) + " has a non-positive Jacobian");

  // Boundary node sets.
  const std::array<std::string, 6> set_names = {"x_min", "x_max", "y_min", "y_max", "z_min", "z_max"};
  for (const auto &s : set_names)
    m.node_sets[s];
  for (Index k = 0; k < nz; ++k)
    for (Index j = 0; j < ny; ++j)
      for (Index i = 0; i < nx; ++i)
      {
        const Index id = nid(i, j, k);
        if (i == 0) m.node_sets["x_min"].push_back(id);
        if (i == nx - 1) m.node_sets["x_max"].push_back(id);
        if (j == 0) m.node_sets["y_min"].push_back(id);
        if (j == ny - 1) m.node_sets["y_max"].push_back(id);
        if (k == 0) m.node_sets["z_min"].push_back(id);
        if (k == nz - 1) m.node_sets["z_max"].push_back(id);
      }

  // Fault faces.
  std::set<std::pair<Index, Index>> taken;
  for (std::size_t f = 0; f < spec.faults.size(); ++f)
  {
    const auto &fs = spec.faults[f];
    m.fault_names.push_back(fs.name);
    const int ax = static_cast<int>(fs.normal_axis);
    const std::array<const std::vector<double> *, 3> g = {&gx, &gy, &gz};
    const Index I = detail::line_index(*g[ax], fs.position);
    if (I < 0)
      throw GeometryError("fault '" + fs.name + "' does not lie on a grid plane");
    if (I == 0 || I == static_cast<Index>(g[ax]->size()) - 1)
      throw GeometryError("fault '" + fs.name + "' lies on the domain boundary");
    std::array<int, 2> other{};
    for (int a = 0, n = 0; a < 3; ++a)
      if (a != ax)
        other[n++] = a;
    for (int q = 0; q < 2; ++q)
      if (!detail::on_line(*g[other[q]], fs.lo[q]) || !detail::on_line(*g[other[q]], fs.hi[q]))
        throw GeometryError("fault '" + fs.name + "' extent is not resolved by the grid");
    if (fs.orientation != 1 && fs.orientation != -1)
      throw InputError("fault orientation must be +1 or -1");

    const std::array<Index, 3> cells = {cx, cy, cz};
    std::size_t count = 0;
    for (Index p = 0; p < cells[other[0]]; ++p)
      for (Index q = 0; q < cells[other[1]]; ++q)
      {
        const double c0 = 0.5 * ((*g[other[0]])[p] + (*g[other[0]])[p + 1]);
        const double c1 = 0.5 * ((*g[other[1]])[q] + (*g[other[1]])[q + 1]);
        if (c0 < fs.lo[0] || c0 > fs.hi[0] || c1 < fs.lo[1] || c1 > fs.hi[1])
          continue;
        std::array<Index, 3> lo{}, hi{};
        lo[ax] = I - 1;
        hi[ax] = I;
        lo[other[0]] = hi[other[0]] = p;
        lo[other[1]] = hi[other[1]] = q;
        const Index h_lo = hid(lo[0], lo[1], lo[2]), h_hi = hid(hi[0], hi[1], hi[2]);
        if (!taken.insert({h_lo, h_hi}).second)
          throw TopologyError("face claimed by two faults (fault '" + fs.name + "')");
        FaultFace ff;
        ff.fault_id = static_cast<int>(f);
        ff.hex_minus = fs.orientation > 0 ? h_lo : h_hi;
        ff.hex_plus = fs.orientation > 0 ? h_hi : h_lo;
        // Face nodes in cyclic order, taken from the lower hex's local face on the +axis side.
        const auto &lf = hex_faces[2 * ax + 1];
        for (int a = 0; a < 4; ++a)
          ff.nodes[a] = m.hexes[h_lo].node_ids[lf[a]];
        m.fault_faces.push_back(ff);
        ++count;
      }
    if (count == 0)
      throw GeometryError("fault '" + fs.name + "' contains no grid faces");
  }
  return m;
}

/// Duplicate nodes across fault faces and create interface elements.
///
/// For every node on a fault face, the incident hexes are grouped into components
/// connected through non-fault faces containing the node; each component gets its
/// own copy of the node (the component with the lowest hex id keeps the original).
inline Mesh split_fault_nodes(const Mesh &in, const std::vector<FaultFace> &faces)
{
  Mesh m = in;
  m.interfaces.clear();
  m.adjacency.clear();

  std::unordered_set<std::array<Index, 4>, detail::Key4Hash> fault_keys;
  for (const auto &f : faces)
  {
    for (Index h : {f.hex_minus, f.hex_plus})
    {
      const auto &ids = in.hexes.at(h).node_ids;
      for (Index v : f.nodes)
        if (std::find(ids.begin(), ids.end(), v) == ids.end())
          throw TopologyError("fault face is not a face of its neighbor hexes");
    }
    if (!fault_keys.insert(detail::sorted4(f.nodes)).second)
      throw TopologyError("duplicate fault face");
  }

  std::vector<std::vector<Index>> node_hexes(in.nodes.size());
  for (const auto &h : in.hexes)
    for (Index v : h.node_ids)
      node_hexes[v].push_back(h.id);

  std::set<Index> fault_nodes;
  for (const auto &f : faces)
    fault_nodes.insert(f.nodes.begin(), f.nodes.end());

  auto shared_face_key = [&](Index h1, Index h2, std::array<Index, 4> &key) {
    int n = 0;
    for (Index a : in.hexes[h1].node_ids)
      for (Index b : in.hexes[h2].node_ids)
        if (a == b)
        {
          if (n == 4)
            return false;
          key[n++] = a;
        }
    if (n != 4)
      return false;
    key = detail::sorted4(key);
    return true;
  };

  for (Index v : fault_nodes)
  {
    const auto &hs = node_hexes[v];
    const int nh = static_cast<int>(hs.size());
    detail::UnionFind uf(nh);
    for (int a = 0; a < nh; ++a)
      for (int b = a + 1; b < nh; ++b)
      {
        std::array<Index, 4> key{};
        if (shared_face_key(hs[a], hs[b], key) && !fault_keys.count(key))
          uf.unite(a, b);
      }
    std::map<int, Index> copy_of_root; // root -> node id
    // hs is sorted by hex id, so the first root seen belongs to the lowest hex.
    for (int a = 0; a < nh; ++a)
    {
      const int r = uf.find(a);
      if (copy_of_root.count(r))
        continue;
      if (copy_of_root.empty())
        copy_of_root[r] = v;
      else
      {
        Node copy = in.nodes[v];
        copy.id = static_cast<Index>(m.nodes.size());
        m.nodes.push_back(copy);
        m.orig_node.push_back(v);
        copy_of_root[r] = copy.id;
      }
    }
    for (int a = 0; a < nh; ++a)
    {
      auto &ids = m.hexes[hs[a]].node_ids;
      for (auto &id : ids)
        if (id == v)
          id = copy_of_root[uf.find(a)];
    }
  }

  // Node sets include every copy of a member node.
  for (auto &[name, ids] : m.node_sets)
  {
    std::unordered_set<Index> members(ids.begin(), ids.end());
    ids.clear();
    for (Index n = 0; n < m.n_nodes(); ++n)
      if (members.count(m.orig_node[n]))
        ids.push_back(n);
  }

  auto local_copy = [&](Index hex, Index orig_id) {
    const auto &o = in.hexes[hex].node_ids;
    for (int a = 0; a < 8; ++a)
      if (o[a] == orig_id)
        return m.hexes[hex].node_ids[a];
    throw TopologyError("node not found in hex");
  };

  for (std::size_t e = 0; e < faces.size(); ++e)
  {
    const auto &f = faces[e];
    InterfaceElement ie;
    ie.id = static_cast<Index>(e);
    ie.fault_id = f.fault_id;
    ie.orig = f.nodes;
    ie.neighbor_cells = {f.hex_minus, f.hex_plus};
    std::array<Vec3, 4> P;
    for (int a = 0; a < 4; ++a)
    {
      ie.face_top[a] = local_copy(f.hex_plus, f.nodes[a]);
      ie.face_bottom[a] = local_copy(f.hex_minus, f.nodes[a]);
      P[a] = m.nodes[ie.face_top[a]].pos();
    }
    Vec3 n = (P[2] - P[0]).cross(P[3] - P[1]);
    if (!(n.norm() > 0.0))
      throw GeometryError("degenerate fault face");
    n.normalize();
    // Orient from the minus cell toward the plus cell.
    Vec3 cm = Vec3::Zero(), cp = Vec3::Zero();
    for (int a = 0; a < 8; ++a)
    {
      cm += m.nodes[m.hexes[f.hex_minus].node_ids[a]].pos() / 8.0;
      cp += m.nodes[m.hexes[f.hex_plus].node_ids[a]].pos() / 8.0;
    }
    if (n.dot(cp - cm) < 0.0)
      n = -n;
    const auto fr = local_frame(n);
    ie.n_f = fr[0];
    ie.m1 = fr[1];
    ie.m2 = fr[2];
    ie.weights = quad_weights(P);
    ie.area = ie.weights[0] + ie.weights[1] + ie.weights[2] + ie.weights[3];
    if (!(ie.area > 0.0))
      throw GeometryError("fault face with zero area");
    ie.centroid = Vec3::Zero();
    for (int a = 0; a < 4; ++a)
      ie.centroid += ie.weights[a] * P[a] / ie.area;
    m.interfaces.push_back(ie);
  }

  // Edge-sharing neighbors on the same fault.
  std::map<std::tuple<int, Index, Index>, std::vector<Index>> edges;
  for (const auto &ie : m.interfaces)
    for (int a = 0; a < 4; ++a)
    {
      Index p = ie.orig[a], q = ie.orig[(a + 1) % 4];
      if (p > q)
        std::swap(p, q);
      edges[{ie.fault_id, p, q}].push_back(ie.id);
    }
  for (const auto &[key, els] : edges)
  {
    if (els.size() > 2)
      throw TopologyError("fault edge shared by more than two faces of one fault");
    if (els.size() == 2)
    {
      const double len = (in.nodes[std::get<1>(key)].pos() - in.nodes[std::get<2>(key)].pos()).norm();
      m.adjacency.push_back({std::min(els[0], els[1]), std::max(els[0], els[1]), len});
    }
  }
  std::sort(m.adjacency.begin(), m.adjacency.end(),
            [](const FaultAdjacency &a, const FaultAdjacency &b) {
              return std::tie(a.a, a.b) < std::tie(b.a, b.b);
            });
  return m;
}

inline Mesh build_structured_domain(const DomainSpec &spec)
{
  const Mesh grid = build_grid(spec);
  return split_fault_nodes(grid, grid.fault_faces);
}

} // namespace faultsim
