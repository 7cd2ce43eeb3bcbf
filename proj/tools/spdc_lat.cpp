// spdc-lat — lattice-state utility for the D2Q9 processor designs.
//
//   spdc-lat make-channel NX NY OUT.lat      walls + pressure inlet/outlet
//   spdc-lat make-box     NX NY OUT.lat      sealed box with a density bump
//   spdc-lat step         IN.lat OUT.lat     software reference steps
//   spdc-lat lat2stream   IN.lat OUT.stream  flatten to a processor stream
//   spdc-lat stream2lat   IN.stream NX NY OUT.lat
//   spdc-lat lat2csv      IN.lat OUT.csv     per-cell density/velocity table

#include <iostream>

#include "CLI11.hpp"
#include "spdc/lbm.hpp"

int main(int argc, char** argv) {
    CLI::App app{"lattice-state builder and converter for D2Q9 stream "
                 "processors"};
    app.require_subcommand(1);

    int nx = 64, ny = 32, steps = 1;
    float bump = 0.05f;
    std::string in_path, out_path;

    CLI::App* channel = app.add_subcommand(
        "make-channel",
        "pressure-driven channel: solid north/south rows, density 1.05 "
        "inlet on the west column, 0.95 outlet on the east column");
    channel->add_option("nx", nx, "lattice width")->required();
    channel->add_option("ny", ny, "lattice height")->required();
    channel->add_option("out", out_path, "output .lat file")->required();

    CLI::App* box = app.add_subcommand(
        "make-box", "sealed box: walls on all edges, centered density bump");
    box->add_option("nx", nx, "lattice width")->required();
    box->add_option("ny", ny, "lattice height")->required();
    box->add_option("out", out_path, "output .lat file")->required();
    box->add_option("--bump", bump, "bump amplitude on top of density 1")
        ->capture_default_str();

    CLI::App* step = app.add_subcommand(
        "step", "advance a lattice with the software reference model");
    step->add_option("in", in_path, "input .lat file")->required();
    step->add_option("out", out_path, "output .lat file")->required();
    step->add_option("--steps", steps, "number of steps")
        ->capture_default_str();

    CLI::App* l2s =
        app.add_subcommand("lat2stream", "flatten a lattice to a stream file");
    l2s->add_option("in", in_path, "input .lat file")->required();
    l2s->add_option("out", out_path, "output stream file")->required();

    CLI::App* s2l = app.add_subcommand(
        "stream2lat", "rebuild a lattice from a processor output stream");
    s2l->add_option("in", in_path, "input stream file")->required();
    s2l->add_option("nx", nx, "lattice width")->required();
    s2l->add_option("ny", ny, "lattice height")->required();
    s2l->add_option("out", out_path, "output .lat file")->required();

    CLI::App* l2c = app.add_subcommand(
        "lat2csv", "per-cell x,y,density,velocity table for plotting");
    l2c->add_option("in", in_path, "input .lat file")->required();
    l2c->add_option("out", out_path, "output .csv file")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (channel->parsed()) {
            spdc::write_lattice(spdc::make_channel(nx, ny), out_path);
        } else if (box->parsed()) {
            spdc::write_lattice(spdc::make_box(nx, ny, bump), out_path);
        } else if (step->parsed()) {
            spdc::Lattice l = spdc::read_lattice(in_path);
            for (int i = 0; i < steps; ++i) l = spdc::lbm_step_reference(l);
            spdc::write_lattice(l, out_path);
            std::cout << "total mass after " << steps
                      << " step(s): " << spdc::total_mass(l) << "\n";
        } else if (l2s->parsed()) {
            spdc::write_stream_auto(
                spdc::lattice_to_stream(spdc::read_lattice(in_path)),
                out_path);
        } else if (s2l->parsed()) {
            spdc::Stream s = spdc::read_stream_auto(in_path);
            spdc::write_lattice(spdc::stream_to_lattice(s, nx, ny), out_path);
        } else {
            spdc::write_flow_csv(spdc::read_lattice(in_path), out_path);
        }
        return 0;
    } catch (const spdc::CompileError& e) {
        std::cerr << e.format(in_path) << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
