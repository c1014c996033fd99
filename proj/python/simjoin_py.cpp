// Copyright 2026 The simjoin Authors.
// SPDX-License-Identifier: Apache-2.0

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "simjoin/bench.hpp"
#include "simjoin/grid.hpp"
#include "simjoin/l1.hpp"
#include "simjoin/lsh.hpp"
#include "simjoin/rangetree.hpp"
#include "simjoin/triangle.hpp"
#include "simjoin/wspd.hpp"

namespace py = pybind11;
using namespace simjoin;

namespace {

// Points cross the boundary as (id, coords) or, for Hamming, (id, int).
Point to_point(const py::handle& item, std::size_t nbits) {
  auto t = item.cast<py::tuple>();
  if (t.size() != 2) throw py::value_error("points are (id, coordinates) pairs");
  const auto id = t[0].cast<PointId>();
  if (nbits == 0) return make_point(id, t[1].cast<std::vector<double>>());
  py::int_ v = t[1].cast<py::int_>();
  std::vector<std::uint64_t> words((nbits + 63) / 64);
  const py::int_ mask(~std::uint64_t{0});
  for (auto& w : words) {
    w = py::int_(v.attr("__and__")(mask)).cast<std::uint64_t>();
    v = v.attr("__rshift__")(64);
  }
  return make_binary_point(id, nbits, std::move(words));
}

std::vector<Point> to_points(const py::iterable& items, std::size_t nbits = 0) {
  std::vector<Point> out;
  for (const auto& x : items) out.push_back(to_point(x, nbits));
  return out;
}

using Pairs = std::vector<std::pair<PointId, PointId>>;
using Triples = std::vector<std::tuple<PointId, PointId, PointId>>;

Pairs pairs_of(const EnumerationSession& s) {
  Pairs out;
  for (const auto& p : s.pairs()) out.emplace_back(p.a, p.b);
  return out;
}

template <typename J, typename... Args>
Pairs run_enum(J& j, Args... args) {
  EnumerationSession s;
  j.enumerate(args..., s);
  s.finish();
  return pairs_of(s);
}

// Shared insert/erase/build surface for the two-sided joins.
template <typename J, typename C>
void bind_pair_join(C& cls, std::size_t nbits = 0) {
  cls.def("build", [nbits](J& j, const py::iterable& a, const py::iterable& b) {
       j.build(to_points(a, nbits), to_points(b, nbits));
     })
      .def("insert_a", [nbits](J& j, const py::handle& p) { j.insert_a(to_point(p, nbits)); })
      .def("insert_b", [nbits](J& j, const py::handle& p) { j.insert_b(to_point(p, nbits)); })
      .def("erase_a", &J::erase_a)
      .def("erase_b", &J::erase_b)
      .def_property_readonly("last_update_work", &J::last_update_work);
}

}  // namespace

PYBIND11_MODULE(_simjoin, m) {
  py::register_exception<Error>(m, "Error", PyExc_ValueError);

  py::enum_<MetricKind>(m, "Metric")
      .value("L1", MetricKind::L1)
      .value("L2", MetricKind::L2)
      .value("LINF", MetricKind::Linf)
      .value("HAMMING", MetricKind::Hamming);
  py::enum_<Side>(m, "Side").value("A", Side::A).value("B", Side::B).value("S", Side::S);

  m.def("distance", [](const py::iterable& p, const py::iterable& q, MetricKind metric) {
    return distance(make_point(0, p.cast<std::vector<double>>()), make_point(1, q.cast<std::vector<double>>()),
                    metric);
  });
  m.def(
      "oracle_join",
      [](const py::iterable& a, const py::iterable& b, MetricKind metric, double r, std::size_t nbits) {
        Pairs out;
        for (const auto& p : oracle_join(to_points(a, nbits), to_points(b, nbits), {metric, r, 0})) {
          out.emplace_back(p.a, p.b);
        }
        return out;
      },
      py::arg("a"), py::arg("b"), py::arg("metric"), py::arg("r"), py::arg("nbits") = 0);

  py::class_<RangeTreeJoin> linf(m, "LinfJoin");
  linf.def(py::init([](std::size_t d, double r) { return RangeTreeJoin::hypercube(d, r); }), py::arg("d"),
           py::arg("r"))
      .def("enumerate", [](const RangeTreeJoin& j) { return run_enum(j); });
  bind_pair_join<RangeTreeJoin>(linf);

  py::class_<L1Join> l1(m, "L1Join");
  l1.def(py::init([](std::size_t d, double r, const std::string& path) {
           const L1Path p = path == "lifting" ? L1Path::kLifting : path == "rotation" ? L1Path::kRotation
                                                                                       : L1Path::kAuto;
           return L1Join(d, r, p);
         }),
         py::arg("d"), py::arg("r"), py::arg("path") = "auto")
      .def("enumerate", [](const L1Join& j) { return run_enum(j); });
  bind_pair_join<L1Join>(l1);

  py::class_<GridJoin> grid(m, "GridJoin");
  grid.def(py::init([](std::size_t d, MetricKind metric, double r, double eps, bool constant_delay) {
             return GridJoin(d, metric, r, eps, {constant_delay});
           }),
           py::arg("d"), py::arg("metric"), py::arg("r"), py::arg("eps"), py::arg("constant_delay") = false)
      .def("enumerate", [](const GridJoin& j) { return run_enum(j); })
      .def_property_readonly("active_cells", &GridJoin::active_cells);
  bind_pair_join<GridJoin>(grid);

  py::class_<WspdJoin> wspd(m, "WspdJoin");
  wspd.def(py::init<std::size_t, MetricKind, double>(), py::arg("d"), py::arg("metric"), py::arg("eps"))
      .def("enumerate", [](const WspdJoin& j, double r) { return run_enum(j, r); }, py::arg("r"))
      .def_property_readonly("pair_count", &WspdJoin::pair_count);
  bind_pair_join<WspdJoin>(wspd);

  py::class_<LshJoin> lsh(m, "LshJoin");
  lsh.def(py::init([](std::size_t d, MetricKind metric, double r, double eps, std::uint64_t seed, bool low_delay,
                      std::size_t n_hint) {
            LshParams p;
            p.metric = metric;
            p.r = r;
            p.eps = eps;
            p.seed = seed;
            p.low_delay = low_delay;
            p.n_hint = n_hint;
            return LshJoin(d, p);
          }),
          py::arg("d"), py::arg("metric"), py::arg("r"), py::arg("eps") = 1.0, py::arg("seed") = 1,
          py::arg("low_delay") = false, py::arg("n_hint") = 0)
      .def("enumerate", [](LshJoin& j) { return run_enum(j); })
      .def_property_readonly("report_radius", &LshJoin::report_radius)
      .def_property_readonly("tables", &LshJoin::tables)
      .def_property_readonly("params", [](const LshJoin& j) {
        const auto& p = j.params();
        py::dict out;
        out["k"] = p.k;
        out["tau"] = p.tau;
        out["M"] = p.M;
        out["m"] = p.m;
        out["w"] = p.w;
        out["rho"] = j.rho();
        return out;
      });
  // Hamming indexes take integer bitstrings; the width is the dimension.
  lsh.def("build", [](LshJoin& j, const py::iterable& a, const py::iterable& b) {
       const std::size_t nbits = j.params().metric == MetricKind::Hamming ? j.dim() : 0;
       j.build(to_points(a, nbits), to_points(b, nbits));
     })
      .def("insert_a",
           [](LshJoin& j, const py::handle& p) {
             j.insert_a(to_point(p, j.params().metric == MetricKind::Hamming ? j.dim() : 0));
           })
      .def("insert_b",
           [](LshJoin& j, const py::handle& p) {
             j.insert_b(to_point(p, j.params().metric == MetricKind::Hamming ? j.dim() : 0));
           })
      .def("erase_a", &LshJoin::erase_a)
      .def("erase_b", &LshJoin::erase_b);

  py::class_<TriangleJoin>(m, "TriangleJoin")
      .def(py::init<std::size_t, MetricKind, double, double>(), py::arg("d"), py::arg("metric"), py::arg("r"),
           py::arg("eps"))
      .def("build",
           [](TriangleJoin& j, const py::iterable& a, const py::iterable& b, const py::iterable& s) {
             j.build(to_points(a), to_points(b), to_points(s));
           })
      .def("insert", [](TriangleJoin& j, Side side, const py::handle& p) { j.insert(side, to_point(p, 0)); })
      .def("erase", &TriangleJoin::erase)
      .def("enumerate", [](const TriangleJoin& j) {
        EnumerationSession s;
        j.enumerate(s);
        s.finish();
        Triples out;
        for (const auto& t : s.triples()) out.emplace_back(t.a, t.b, t.s);
        return out;
      });

  m.def(
      "generate_workload",
      [](const std::string& kind, std::size_t d, std::size_t n, std::size_t sides, std::size_t updates,
         std::size_t enum_every, double span, std::uint64_t seed) {
        GeneratorSpec g;
        g.kind = kind;
        g.d = d;
        g.n = n;
        g.sides = sides;
        g.updates = updates;
        g.enum_every = enum_every;
        g.span = span;
        g.seed = seed;
        std::ostringstream out;
        write_workload(out, generate(g));
        return out.str();
      },
      py::arg("kind") = "uniform", py::arg("d") = 2, py::arg("n") = 100, py::arg("sides") = 2,
      py::arg("updates") = 0, py::arg("enum_every") = 10, py::arg("span") = 1.0, py::arg("seed") = 1);

  // Replays workload text and returns the JSON-lines report.
  m.def(
      "run_workload",
      [](const std::string& text, const std::string& index, MetricKind metric, double r, double eps,
         const std::string& mode, bool verify) {
        std::istringstream in(text);
        const Workload w = parse_workload(in, metric == MetricKind::Hamming);
        IndexConfig c;
        c.index = index;
        c.metric = metric;
        c.r = r;
        c.eps = eps;
        c.mode = mode;
        RunOptions opt;
        opt.verify = verify;
        std::ostringstream out;
        write_jsonl(out, run(c, w, opt));
        return out.str();
      },
      py::arg("workload"), py::arg("index"), py::arg("metric"), py::arg("r"), py::arg("eps") = 0.5,
      py::arg("mode") = "default", py::arg("verify") = true);
}
