#include "wwlab/io.hpp"

#include <cstring>
#include <fstream>
#include <stdexcept>

namespace ww {

namespace {
void put_u32(std::ostream& os, uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                          static_cast<unsigned char>(v >> 16), static_cast<unsigned char>(v >> 24)};
    os.write(reinterpret_cast<char*>(b), 4);
}
uint32_t get_u32(std::istream& is) {
    unsigned char b[4];
    is.read(reinterpret_cast<char*>(b), 4);
    return b[0] | (b[1] << 8) | (b[2] << 16) | (uint32_t(b[3]) << 24);
}
} // namespace

void write_field(const Field& f, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("write_field: cannot open " + path);
    os.write("WWF1", 4);
    const StripGrid& g = *f.grid;
    put_u32(os, f.rank);
    put_u32(os, g.dim);
    put_u32(os, g.n1);
    put_u32(os, g.n2);
    put_u32(os, g.nv);
    os.write(reinterpret_cast<const char*>(&g.depth), 8);
    os.write(reinterpret_cast<const char*>(f.data.data()),
             static_cast<std::streamsize>(f.data.size() * 8));
    if (!os) throw std::runtime_error("write_field: write failed for " + path);
}

Field read_field(const std::string& path, StripGrid& grid_out) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("read_field: cannot open " + path);
    char magic[4];
    is.read(magic, 4);
    if (std::strncmp(magic, "WWF1", 4) != 0)
        throw std::runtime_error("read_field: bad magic in " + path);
    uint32_t rank = get_u32(is), dim = get_u32(is);
    uint32_t n1 = get_u32(is), n2 = get_u32(is), nv = get_u32(is);
    double depth;
    is.read(reinterpret_cast<char*>(&depth), 8);
    grid_out = (dim == 2) ? StripGrid(n1, nv, depth) : StripGrid(n1, n2, nv, depth);
    Field f(grid_out, static_cast<int>(rank));
    is.read(reinterpret_cast<char*>(f.data.data()),
            static_cast<std::streamsize>(f.data.size() * 8));
    if (!is) throw std::runtime_error("read_field: truncated file " + path);
    return f;
}

void write_field_csv(const Field& f, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("write_field_csv: cannot open " + path);
    const StripGrid& g = *f.grid;
    os << "# wwf-csv v1 rank=" << f.rank << " dim=" << g.dim << " n1=" << g.n1
       << " n2=" << g.n2 << " nv=" << g.nv << " depth=" << g.depth
       << " order=component-major,node-row-major(i1,i2,j)\n";
    os.precision(17);
    for (int c = 0; c < f.ncomp(); ++c)
        for (int n = 0; n < g.nnodes(); ++n)
            os << f.at(c, n) << ((n + 1 == g.nnodes()) ? "\n" : ",");
}

} // namespace ww
