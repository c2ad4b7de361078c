#include "nids/bundle.hpp"

#include <cstring>

#include "nids/io_util.hpp"

namespace nids {

namespace {

constexpr char kBundleMagic[9] = "NIDSBNDL";
constexpr std::uint32_t kBundleVersion = 1;

void snap_span(std::span<double> values) {
    for (double &v : values)
        v = static_cast<double>(static_cast<float>(v));
}

void write_tensor(ByteWriter &w, const std::string &name, std::uint64_t rows, std::uint64_t cols,
                  std::span<const double> values) {
    w.str(name);
    w.u64(rows);
    w.u64(cols);
    for (double v : values)
        w.f32(static_cast<float>(v));
}

struct TensorIn {
    std::string name;
    std::uint64_t rows = 0;
    std::uint64_t cols = 0;
    std::vector<double> values;
};

TensorIn read_tensor(ByteReader &r) {
    TensorIn t;
    t.name = r.str();
    t.rows = r.u64();
    t.cols = r.u64();
    t.values.resize(t.rows * t.cols);
    for (double &v : t.values)
        v = static_cast<double>(r.f32());
    return t;
}

void expect_tensor(const TensorIn &t, const std::string &name, std::uint64_t rows,
                   std::uint64_t cols) {
    if (t.name != name || t.rows != rows || t.cols != cols)
        throw FormatError("bundle: unexpected tensor layout at '" + t.name + "'");
}

} // namespace

void snap_to_f32(DbnModel &model) {
    for (auto &rbm : model.rbms) {
        snap_span(rbm.w.data);
        snap_span(rbm.vbias);
        snap_span(rbm.hbias);
    }
    snap_span(model.head_w.data);
    snap_span(model.head_b);
}

void snap_to_f32(MlpModel &model) {
    for (auto &w : model.weights)
        snap_span(w.data);
    for (auto &b : model.biases)
        snap_span(b);
}

std::vector<int> ModelBundle::predict(const Matrix &features) const {
    if (kind == ModelKind::kDbn) {
        if (!dbn)
            throw StateError("bundle holds no DBN model");
        return dbn_predict(*dbn, features);
    }
    if (!mlp)
        throw StateError("bundle holds no MLP model");
    return mlp_predict(*mlp, features);
}

std::size_t ModelBundle::input_width() const {
    if (kind == ModelKind::kDbn && dbn)
        return dbn->arch.layer_sizes.front();
    if (kind == ModelKind::kMlp && mlp)
        return mlp->layer_sizes.front();
    throw StateError("bundle holds no model");
}

void save_bundle(const ModelBundle &bundle, const std::filesystem::path &path) {
    ByteWriter body;
    body.u8(bundle.kind == ModelKind::kDbn ? 0 : 1);
    body.u64(bundle.class_names.size());
    for (const auto &n : bundle.class_names)
        body.str(n);
    body.str(bundle.config_echo);
    body.str(bundle.metrics_snapshot);

    if (bundle.kind == ModelKind::kDbn) {
        if (!bundle.dbn)
            throw StateError("save_bundle: missing DBN parameters");
        const DbnModel &m = *bundle.dbn;
        body.u64(m.arch.layer_sizes.size());
        for (std::size_t s : m.arch.layer_sizes)
            body.u64(s);
        body.u64(m.arch.n_classes);
        body.u8(m.pretrained ? 1 : 0);
        body.u8(m.head_ready ? 1 : 0);
        body.u8(m.fine_tuned ? 1 : 0);
        body.u64(m.rbms.size() * 3 + 2);
        for (std::size_t l = 0; l < m.rbms.size(); ++l) {
            const auto &rbm = m.rbms[l];
            const std::string tag = "rbm" + std::to_string(l);
            write_tensor(body, tag + ".w", rbm.w.rows, rbm.w.cols, rbm.w.data);
            write_tensor(body, tag + ".vbias", 1, rbm.vbias.size(), rbm.vbias);
            write_tensor(body, tag + ".hbias", 1, rbm.hbias.size(), rbm.hbias);
        }
        write_tensor(body, "head.w", m.head_w.rows, m.head_w.cols, m.head_w.data);
        write_tensor(body, "head.b", 1, m.head_b.size(), m.head_b);
    } else {
        if (!bundle.mlp)
            throw StateError("save_bundle: missing MLP parameters");
        const MlpModel &m = *bundle.mlp;
        body.u64(m.layer_sizes.size());
        for (std::size_t s : m.layer_sizes)
            body.u64(s);
        body.u8(m.trained ? 1 : 0);
        body.u64(m.weights.size() * 2);
        for (std::size_t l = 0; l < m.weights.size(); ++l) {
            const std::string tag = "layer" + std::to_string(l);
            write_tensor(body, tag + ".w", m.weights[l].rows, m.weights[l].cols,
                         m.weights[l].data);
            write_tensor(body, tag + ".b", 1, m.biases[l].size(), m.biases[l]);
        }
    }

    // the pipeline artifact keeps its own bit-exact f64 encoding
    const auto artifact_bytes = artifact_to_bytes(bundle.artifact);
    body.u64(artifact_bytes.size());
    body.raw(artifact_bytes);

    write_file(path, wrap_container(kBundleMagic, kBundleVersion, body.bytes()));
}

ModelBundle load_bundle(const std::filesystem::path &path) {
    const auto file = read_file(path);
    ByteReader r(unwrap_container(file, kBundleMagic, kBundleVersion));

    ModelBundle bundle;
    bundle.kind = r.u8() == 0 ? ModelKind::kDbn : ModelKind::kMlp;
    const std::uint64_t n_classes = r.u64();
    for (std::uint64_t i = 0; i < n_classes; ++i)
        bundle.class_names.push_back(r.str());
    bundle.config_echo = r.str();
    bundle.metrics_snapshot = r.str();

    if (bundle.kind == ModelKind::kDbn) {
        DbnModel m;
        const std::uint64_t n_layers = r.u64();
        for (std::uint64_t i = 0; i < n_layers; ++i)
            m.arch.layer_sizes.push_back(r.u64());
        m.arch.n_classes = r.u64();
        m.pretrained = r.u8() != 0;
        m.head_ready = r.u8() != 0;
        m.fine_tuned = r.u8() != 0;
        const std::uint64_t n_tensors = r.u64();
        if (n_layers < 2 || n_tensors != (n_layers - 1) * 3 + 2)
            throw FormatError("bundle: inconsistent DBN tensor directory");
        for (std::size_t l = 0; l + 1 < n_layers; ++l) {
            const std::string tag = "rbm" + std::to_string(l);
            RbmParams rbm;
            TensorIn w = read_tensor(r);
            expect_tensor(w, tag + ".w", m.arch.layer_sizes[l], m.arch.layer_sizes[l + 1]);
            rbm.w = Matrix(w.rows, w.cols);
            rbm.w.data = std::move(w.values);
            TensorIn vb = read_tensor(r);
            expect_tensor(vb, tag + ".vbias", 1, m.arch.layer_sizes[l]);
            rbm.vbias = std::move(vb.values);
            TensorIn hb = read_tensor(r);
            expect_tensor(hb, tag + ".hbias", 1, m.arch.layer_sizes[l + 1]);
            rbm.hbias = std::move(hb.values);
            m.rbms.push_back(std::move(rbm));
        }
        TensorIn hw = read_tensor(r);
        expect_tensor(hw, "head.w", m.arch.layer_sizes.back(), m.arch.n_classes);
        m.head_w = Matrix(hw.rows, hw.cols);
        m.head_w.data = std::move(hw.values);
        TensorIn hb = read_tensor(r);
        expect_tensor(hb, "head.b", 1, m.arch.n_classes);
        m.head_b = std::move(hb.values);
        bundle.dbn = std::move(m);
    } else {
        MlpModel m;
        const std::uint64_t n_layers = r.u64();
        for (std::uint64_t i = 0; i < n_layers; ++i)
            m.layer_sizes.push_back(r.u64());
        m.trained = r.u8() != 0;
        const std::uint64_t n_tensors = r.u64();
        if (n_layers < 2 || n_tensors != (n_layers - 1) * 2)
            throw FormatError("bundle: inconsistent MLP tensor directory");
        for (std::size_t l = 0; l + 1 < n_layers; ++l) {
            const std::string tag = "layer" + std::to_string(l);
            TensorIn w = read_tensor(r);
            expect_tensor(w, tag + ".w", m.layer_sizes[l], m.layer_sizes[l + 1]);
            Matrix wm(w.rows, w.cols);
            wm.data = std::move(w.values);
            m.weights.push_back(std::move(wm));
            TensorIn b = read_tensor(r);
            expect_tensor(b, tag + ".b", 1, m.layer_sizes[l + 1]);
            m.biases.push_back(std::move(b.values));
        }
        bundle.mlp = std::move(m);
    }

    const std::uint64_t artifact_len = r.u64();
    bundle.artifact = artifact_from_bytes(r.raw(artifact_len));
    return bundle;
}

} // namespace nids
