#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <algorithm>

#include "eitfuse/dataset.hpp"
#include "eitfuse/error.hpp"
#include "eitfuse/guidance.hpp"
#include "eitfuse/jacobian.hpp"
#include "eitfuse/metrics.hpp"
#include "eitfuse/phantoms.hpp"
#include "eitfuse/recon.hpp"

namespace py = pybind11;
using namespace eitfuse;

namespace {

using F64 = py::array_t<double, py::array::c_style | py::array::forcecast>;
using U8 = py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>;

PixelImage to_image(const F64& a) {
    if (a.ndim() != 2) throw InputError("expected a 2-D array");
    PixelImage img(static_cast<int>(a.shape(0)), static_cast<int>(a.shape(1)));
    std::copy_n(a.data(), img.size(), img.data.begin());
    return img;
}

MaskImage to_mask(const U8& a) {
    if (a.ndim() != 2) throw InputError("expected a 2-D array");
    MaskImage m(static_cast<int>(a.shape(0)), static_cast<int>(a.shape(1)));
    std::copy_n(a.data(), m.size(), m.data.begin());
    return m;
}

template <class T>
py::array_t<T> to_array(const Raster<T>& img) {
    py::array_t<T> out({img.rows, img.cols});
    std::copy(img.data.begin(), img.data.end(), out.mutable_data());
    return out;
}

MeasurementFrame to_frame(const F64& a) {
    if (a.size() != kFrameSize) throw InputError("a frame has 104 entries");
    MeasurementFrame f;
    f.kind = FrameKind::NormalizedDifference;
    std::copy_n(a.data(), kFrameSize, f.values.begin());
    return f;
}

py::array_t<double> frame_array(const MeasurementFrame& f) {
    py::array_t<double> out(kFrameSize);
    std::copy(f.values.begin(), f.values.end(), out.mutable_data());
    return out;
}

/// Forward model and linearization for one sensor configuration.
class Simulator {
public:
    Simulator(double forward_h, double jacobian_h)
        : fine_(build_mesh(geometry_, forward_h)), coarse_(build_mesh(geometry_, jacobian_h)) {
        reference_ = extract_frame(full_forward(fine_, uniform(fine_), geometry_, geometry_.current));
    }

    py::array_t<double> difference(std::uint64_t seed, int objects, std::optional<double> snr) const {
        const PhantomScene scene = sample_phantom(seed, objects, geometry_);
        return frame_array(add_noise(normalized_difference(raw(scene), reference_), snr, noise_seed(seed, 0)));
    }

    py::array_t<double> truth(std::uint64_t seed, int objects) const {
        return to_array(truth_image(sample_phantom(seed, objects, geometry_), grid_));
    }

    py::array_t<std::uint8_t> mask(std::uint64_t seed, int objects) const {
        return to_array(mask_image(sample_phantom(seed, objects, geometry_), grid_));
    }

    py::array_t<double> jacobian_matrix() {
        const SensitivityMatrix& J = sensitivity();
        py::array_t<double> out({J.rows(), J.cols()});
        auto v = out.mutable_unchecked<2>();
        for (Eigen::Index r = 0; r < J.rows(); ++r)
            for (Eigen::Index c = 0; c < J.cols(); ++c) v(r, c) = J.matrix(r, c);
        return out;
    }

    py::array_t<double> tikhonov(const F64& dv, std::optional<double> lambda) {
        const SensitivityMatrix& J = sensitivity();
        return to_array(treg_gl(J, to_frame(dv), lambda.value_or(default_lambda(J))));
    }

    py::array_t<double> cross_gradient_recon(const F64& dv, const U8& mask, std::optional<double> lambda,
                                             std::optional<double> gamma) {
        const SensitivityMatrix& J = sensitivity();
        const double l = lambda.value_or(default_lambda(J));
        return to_array(cg_recon(J, to_frame(dv), to_mask(mask), l, gamma.value_or(l)));
    }

    std::size_t forward_elements() const { return fine_.element_count(); }

private:
    static ConductivityField uniform(const Mesh& m) {
        return ConductivityField::uniform(m.element_count(), kBackgroundConductivity);
    }
    MeasurementFrame raw(const PhantomScene& scene) const {
        return extract_frame(full_forward(fine_, rasterize_field(scene, fine_), geometry_, geometry_.current));
    }
    const SensitivityMatrix& sensitivity() {
        if (!J_) J_ = jacobian(coarse_, uniform(coarse_), geometry_, geometry_.current, grid_);
        return *J_;
    }

    SensorGeometry geometry_;
    PixelGrid grid_{kImageSide, geometry_.radius_mm};
    Mesh fine_;
    Mesh coarse_;
    MeasurementFrame reference_;
    std::optional<SensitivityMatrix> J_;
};

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Simulation, reconstruction and metrics for impedance-optical EIT";

    py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    m.attr("FRAME_SIZE") = kFrameSize;
    m.attr("IMAGE_SIDE") = kImageSide;
    m.attr("FORMAT_VERSION") = kDatasetFormatVersion;

    py::class_<Simulator>(m, "Simulator")
        .def(py::init<double, double>(), py::arg("forward_h") = 0.1, py::arg("jacobian_h") = 0.2)
        .def("difference", &Simulator::difference, py::arg("seed"), py::arg("objects"), py::arg("snr") = py::none(),
             "Normalized difference frame (104,) for a sampled phantom.")
        .def("truth", &Simulator::truth, py::arg("seed"), py::arg("objects"))
        .def("mask", &Simulator::mask, py::arg("seed"), py::arg("objects"))
        .def("jacobian", &Simulator::jacobian_matrix)
        .def("tikhonov", &Simulator::tikhonov, py::arg("dv"), py::arg("lam") = py::none())
        .def("cg", &Simulator::cross_gradient_recon, py::arg("dv"), py::arg("mask"), py::arg("lam") = py::none(),
             py::arg("gamma") = py::none())
        .def_property_readonly("forward_elements", &Simulator::forward_elements);

    m.def("rie", [](const F64& a, const F64& b) { return rie(to_image(a), to_image(b)); });
    m.def("mssim", [](const F64& a, const F64& b) { return mssim(to_image(a), to_image(b)); });
    m.def("cross_gradient", [](const F64& a, const F64& b) { return to_array(cross_gradient(to_image(a), to_image(b))); });

    m.def(
        "process_guidance",
        [](const U8& rgb, double beta, std::optional<int> theta) {
            if (rgb.ndim() != 3 || rgb.shape(2) != 3) throw InputError("expected an (rows, cols, 3) uint8 array");
            RgbImage img(static_cast<int>(rgb.shape(0)), static_cast<int>(rgb.shape(1)));
            std::copy_n(rgb.data(), img.rgb.size(), img.rgb.begin());
            GuidanceOptions opt;
            opt.beta = beta;
            opt.theta_deg = theta;
            return to_array(process_guidance(img, opt));
        },
        py::arg("rgb"), py::arg("beta") = 0.5, py::arg("theta") = py::none());

    m.def(
        "split_sizes", [](int n) { return split_sizes(n); }, py::arg("n"));
    m.def(
        "full_scale_split",
        [] {
            DatasetConfig c;
            c.counts = kFullScaleCounts;
            const SplitIndices s = stratified_split(c, 0);
            return py::make_tuple(s.train.size(), s.val.size(), s.test.size());
        },
        "(train, val, test) sizes for the full-scale sample counts.");
}
