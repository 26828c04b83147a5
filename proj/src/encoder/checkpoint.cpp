#include "actcluster/encoder/checkpoint.hpp"

#include <fstream>
#include <map>
#include <stdexcept>
#include <string>

#include "actcluster/data/canonical.hpp"

namespace actc {

namespace {

void write_tensor(std::ostream& out, const std::string& name, const Tensor& t)
{
    out << "tensor " << name << ' ' << t.rank();
    for (Index d : t.shape()) out << ' ' << d;
    out << '\n';
    for (Index i = 0; i < t.size(); ++i) {
        if (i) out << ' ';
        out << format_double(t[i]);
    }
    out << '\n';
}

Tensor vector_tensor(const Eigen::VectorXd& v)
{
    return Tensor({v.size()}, v);
}

void expect(std::istream& in, const std::string& word)
{
    std::string got;
    if (!(in >> got) || got != word) {
        throw std::runtime_error("encoder checkpoint: expected '" + word + "', found '" + got + "'");
    }
}

}  // namespace

void write_encoder(std::ostream& out, const Encoder& encoder)
{
    const EncoderConfig& cfg = encoder.config();
    out << "actcluster-encoder 1\n";
    out << "channels " << encoder.channels() << " latent " << cfg.latent_dim << " window " << cfg.window_length
        << " pool " << cfg.pool_width << " activation " << (cfg.activation == Activation::relu ? "relu" : "none")
        << " batchnorm " << (cfg.batchnorm ? 1 : 0) << '\n';
    for (const ConvSpec& c : cfg.convs) out << "conv " << c.filter_len << ' ' << c.stride << ' ' << c.filters << '\n';

    std::map<std::string, Tensor> all;
    for (const auto& [name, p] : encoder.params().entries()) all.emplace(name, p.value);
    for (std::size_t l = 0; l < encoder.batchnorm_state().size(); ++l) {
        const auto& s = encoder.batchnorm_state()[l];
        all.emplace("bn" + std::to_string(l) + ".running_mean", vector_tensor(s.running_mean));
        all.emplace("bn" + std::to_string(l) + ".running_var", vector_tensor(s.running_var));
    }
    for (const auto& [name, t] : all) write_tensor(out, name, t);
}

Encoder read_encoder(std::istream& in)
{
    expect(in, "actcluster-encoder");
    int version = 0;
    in >> version;
    if (version != 1) throw std::runtime_error("encoder checkpoint: unsupported version " + std::to_string(version));

    EncoderConfig cfg;
    Index channels = 0;
    std::string activation;
    int batchnorm = 1;
    expect(in, "channels");
    in >> channels;
    expect(in, "latent");
    in >> cfg.latent_dim;
    expect(in, "window");
    in >> cfg.window_length;
    expect(in, "pool");
    in >> cfg.pool_width;
    expect(in, "activation");
    in >> activation;
    expect(in, "batchnorm");
    in >> batchnorm;
    cfg.activation = activation == "none" ? Activation::none : Activation::relu;
    cfg.batchnorm = batchnorm != 0;
    for (ConvSpec& c : cfg.convs) {
        expect(in, "conv");
        in >> c.filter_len >> c.stride >> c.filters;
    }
    if (!in) throw std::runtime_error("encoder checkpoint: truncated header");

    Encoder enc(cfg, channels, 0);
    std::string word;
    std::size_t seen = 0;
    while (in >> word) {
        if (word != "tensor") throw std::runtime_error("encoder checkpoint: expected 'tensor', found '" + word + "'");
        std::string name;
        std::size_t rank = 0;
        in >> name >> rank;
        std::vector<Index> shape(rank);
        for (auto& d : shape) in >> d;
        Tensor t(shape);
        for (Index i = 0; i < t.size(); ++i) {
            std::string v;
            in >> v;
            t[i] = std::stod(v);
        }
        if (!in) throw std::runtime_error("encoder checkpoint: truncated tensor '" + name + "'");

        const auto dot = name.find('.');
        const std::string suffix = dot == std::string::npos ? "" : name.substr(dot + 1);
        if (suffix == "running_mean" || suffix == "running_var") {
            const std::size_t l = std::stoul(name.substr(2, dot - 2));
            if (l >= enc.batchnorm_state().size()) throw std::runtime_error("encoder checkpoint: bad layer in " + name);
            auto& target = suffix == "running_mean" ? enc.batchnorm_state()[l].running_mean
                                                    : enc.batchnorm_state()[l].running_var;
            if (target.size() != t.size()) throw std::runtime_error("encoder checkpoint: size mismatch for " + name);
            target = t.data();
        } else {
            Tensor& dst = enc.params()[name];
            if (dst.shape() != t.shape()) {
                throw std::runtime_error("encoder checkpoint: tensor " + name + " has shape " + shape_string(t.shape())
                                         + ", expected " + shape_string(dst.shape()));
            }
            dst = std::move(t);
        }
        ++seen;
    }
    const std::size_t expected = enc.params().entries().size() + 2 * enc.batchnorm_state().size();
    if (seen != expected) {
        throw std::runtime_error("encoder checkpoint: " + std::to_string(seen) + " tensors, expected "
                                 + std::to_string(expected));
    }
    return enc;
}

void save_encoder(const std::filesystem::path& path, const Encoder& encoder)
{
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    write_encoder(out, encoder);
}

Encoder load_encoder(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    return read_encoder(in);
}

}  // namespace actc
