#include "repunlearn/transformation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "json.hpp"
#include "repunlearn/json_io.hpp"

namespace repunlearn {

std::size_t Transformation::num_params() const {
    std::size_t n = 0;
    for (const auto& l : layers) n += l.weights.data.size() + l.bias.size();
    return n;
}

std::vector<double> Transformation::flatten_params() const {
    std::vector<double> flat;
    flat.reserve(num_params());
    for (const auto& l : layers) {
        flat.insert(flat.end(), l.weights.data.begin(), l.weights.data.end());
        flat.insert(flat.end(), l.bias.begin(), l.bias.end());
    }
    return flat;
}

void Transformation::set_params(std::span<const double> flat) {
    if (flat.size() != num_params()) throw std::invalid_argument("transformation: size mismatch");
    std::size_t off = 0;
    for (auto& l : layers) {
        std::copy_n(flat.begin() + off, l.weights.data.size(), l.weights.data.begin());
        off += l.weights.data.size();
        std::copy_n(flat.begin() + off, l.bias.size(), l.bias.begin());
        off += l.bias.size();
    }
}

Transformation init_transformation(std::size_t dim, std::size_t depth,
                                   const std::vector<std::size_t>& widths, Rng& rng) {
    if (depth > 2) throw std::invalid_argument("transformation: depth must be 0, 1 or 2");
    if (widths.size() != depth) throw std::invalid_argument("transformation: widths/depth mismatch");
    for (std::size_t w : widths) {
        if (w == 0) throw std::invalid_argument("transformation: zero hidden width");
    }
    Transformation f;
    f.depth = depth;
    f.dim = dim;
    f.widths = widths;
    f.residual = depth >= 1;

    if (depth == 0) {
        AffineLayer layer;
        layer.weights = identity(dim);
        layer.bias.assign(dim, 0.0);
        f.layers.push_back(std::move(layer));
        return f;
    }

    std::vector<std::size_t> dims;
    dims.push_back(dim);
    dims.insert(dims.end(), widths.begin(), widths.end());
    dims.push_back(dim);
    for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
        AffineLayer layer;
        layer.weights = Matrix(dims[l + 1], dims[l]);
        layer.bias.assign(dims[l + 1], 0.0);
        if (l + 2 < dims.size()) {
            const double bound = std::sqrt(6.0 / static_cast<double>(dims[l]));
            for (double& w : layer.weights.data) w = bound * (2.0 * rng.uniform() - 1.0);
        }
        // Final layer stays zero: the residual branch vanishes at step 0.
        f.layers.push_back(std::move(layer));
    }
    return f;
}

namespace {

Matrix affine_forward(const AffineLayer& layer, const Matrix& x) {
    Matrix out = matmul_nt(x, layer.weights);
    for (std::size_t i = 0; i < out.rows; ++i) {
        auto row = out.row(i);
        for (std::size_t j = 0; j < out.cols; ++j) row[j] += layer.bias[j];
    }
    return out;
}

struct Trace {
    std::vector<Matrix> inputs;  // per layer
    std::vector<Matrix> pre;     // affine outputs before ReLU
};

Matrix forward_traced(const Transformation& f, const Matrix& z, Trace* trace) {
    if (z.cols != f.dim) throw std::invalid_argument("transformation: dim mismatch");
    Matrix h = z;
    for (std::size_t l = 0; l < f.layers.size(); ++l) {
        if (trace != nullptr) trace->inputs.push_back(h);
        Matrix pre = affine_forward(f.layers[l], h);
        const bool hidden = l + 1 < f.layers.size();
        if (trace != nullptr) trace->pre.push_back(pre);
        if (hidden) {
            for (double& v : pre.data) v = v > 0.0 ? v : 0.0;
        }
        h = std::move(pre);
    }
    if (f.residual) {
        for (std::size_t i = 0; i < h.rows; ++i) {
            auto out = h.row(i);
            auto in = z.row(i);
            for (std::size_t j = 0; j < h.cols; ++j) out[j] += in[j];
        }
    }
    return h;
}

}  // namespace

Matrix apply(const Transformation& f, const Matrix& z) {
    return forward_traced(f, z, nullptr);
}

void apply_backward_accumulate(const Transformation& f, const Matrix& z, const Matrix& dout,
                               std::vector<double>& grad) {
    if (grad.size() != f.num_params()) {
        throw std::invalid_argument("transformation backward: grad size mismatch");
    }
    Trace trace;
    (void)forward_traced(f, z, &trace);

    std::vector<std::size_t> offsets(f.layers.size());
    std::size_t off = 0;
    for (std::size_t l = 0; l < f.layers.size(); ++l) {
        offsets[l] = off;
        off += f.layers[l].weights.data.size() + f.layers[l].bias.size();
    }

    // The residual skip feeds dout straight to the input side; the mlp branch
    // receives the same dout at its final affine layer.
    Matrix delta = dout;
    for (std::size_t li = f.layers.size(); li-- > 0;) {
        const AffineLayer& layer = f.layers[li];
        const Matrix& input = trace.inputs[li];
        double* gw = grad.data() + offsets[li];
        double* gb = gw + layer.weights.data.size();
        for (std::size_t i = 0; i < delta.rows; ++i) {
            auto drow = delta.row(i);
            auto xrow = input.row(i);
            for (std::size_t o = 0; o < layer.weights.rows; ++o) {
                const double d = drow[o];
                if (d == 0.0) continue;
                double* gwrow = gw + o * layer.weights.cols;
                for (std::size_t j = 0; j < layer.weights.cols; ++j) gwrow[j] += d * xrow[j];
                gb[o] += d;
            }
        }
        if (li == 0) break;
        Matrix dinput = matmul(delta, layer.weights);
        const Matrix& pre = trace.pre[li - 1];
        for (std::size_t k = 0; k < dinput.data.size(); ++k) {
            if (pre.data[k] <= 0.0) dinput.data[k] = 0.0;
        }
        delta = std::move(dinput);
    }
}

void save_transformation_json(const Transformation& f, const std::string& path) {
    JsonWriter w;
    w.begin_object();
    w.key("format_version").value_uint(1);
    w.key("kind").value("transformation");
    w.key("depth").value_uint(f.depth);
    w.key("dim").value_uint(f.dim);
    w.key("widths").value_array(std::span<const std::size_t>(f.widths));
    w.key("residual").value_uint(f.residual ? 1 : 0);
    w.key("layers").begin_array();
    for (const auto& l : f.layers) {
        w.begin_object();
        w.key("rows").value_uint(l.weights.rows);
        w.key("cols").value_uint(l.weights.cols);
        w.key("weights").value_array(std::span<const double>(l.weights.data));
        w.key("bias").value_array(std::span<const double>(l.bias));
        w.end_object();
    }
    w.end_array();
    w.end_object();
    write_text_file(path, w.str() + "\n");
}

Transformation load_transformation_json(const std::string& path) {
    const nlohmann::json doc = nlohmann::json::parse(read_text_file(path));
    if (doc.at("format_version").get<int>() != 1 ||
        doc.at("kind").get<std::string>() != "transformation") {
        throw std::runtime_error("unsupported transformation file: " + path);
    }
    Transformation f;
    f.depth = doc.at("depth").get<std::size_t>();
    f.dim = doc.at("dim").get<std::size_t>();
    f.widths = doc.at("widths").get<std::vector<std::size_t>>();
    f.residual = doc.at("residual").get<int>() != 0;
    for (const auto& jl : doc.at("layers")) {
        AffineLayer layer;
        layer.weights = Matrix(jl.at("rows").get<std::size_t>(), jl.at("cols").get<std::size_t>());
        const auto wdata = jl.at("weights").get<std::vector<double>>();
        if (wdata.size() != layer.weights.data.size()) {
            throw std::runtime_error("transformation weights shape mismatch: " + path);
        }
        layer.weights.data = wdata;
        layer.bias = jl.at("bias").get<std::vector<double>>();
        f.layers.push_back(std::move(layer));
    }
    if (f.layers.size() != f.depth + 1) {
        throw std::runtime_error("transformation layer count mismatch: " + path);
    }
    return f;
}

}  // namespace repunlearn
