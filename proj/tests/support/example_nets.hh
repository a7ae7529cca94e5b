#ifndef NNCT_TESTS_EXAMPLE_NETS_HH_
#define NNCT_TESTS_EXAMPLE_NETS_HH_

#include "nnct/net.hh"

namespace nnct::testing {

// The running example net: complex places p1, p2; simple places p3, p4, p5;
// colours red, green, blue, black with zeta: red->p4, green->p5, blue->p3.
struct ExampleNet {
    Net net;
    PlaceId p1, p2, p3, p4, p5;
    ColourId red, green, blue, black;
    ComplexToken m1, m2, m3;
};

inline ExampleNet make_example_net() {
    ExampleNet e;
    e.p1 = e.net.add_complex("p1");
    e.p2 = e.net.add_complex("p2");
    e.p3 = e.net.add_simple("p3");
    e.p4 = e.net.add_simple("p4");
    e.p5 = e.net.add_simple("p5");
    e.red = e.net.add_colour("red", e.p4);
    e.green = e.net.add_colour("green", e.p5);
    e.blue = e.net.add_colour("blue", e.p3);
    e.black = e.net.add_colour("black", e.p3); // black is never transferred
    e.net.name = "example1";

    e.m1.add(e.black, 2);
    e.m1.add(e.blue, 1);
    e.m1.add(e.green, 2);
    e.m1.add(e.red, 1);
    e.m2.add(e.black, 2);
    e.m3.add(e.black, 3);

    // r1: removes an empty token from p1 and a plain token from p3, puts m1
    // into p2.
    SimpleRule r1;
    r1.in.add_token(e.p1, ComplexToken{});
    r1.in.add_simple(e.p3, 1);
    r1.out.add_token(e.p2, e.m1);
    e.net.add_rule({"r1", r1});

    ComplexRule r2;
    r2.from = e.p1;
    r2.to = e.p2;
    r2.inject.add(e.black, 1);
    e.net.add_rule({"r2", r2});

    ComplexRule r3;
    r3.from = e.p2;
    r3.to = e.p1;
    r3.in.add_simple(e.p5, 1);
    e.net.add_rule({"r3", r3});

    TransferRule r4;
    r4.from = e.p1;
    r4.to = e.p1;
    r4.active = {e.red, e.green, e.blue};
    std::sort(r4.active.begin(), r4.active.end());
    e.net.add_rule({"r4", r4});
    return e;
}

// The displayed configuration: p1 holds m1, the empty token and m2; p2
// holds m3; simple places empty.
inline Configuration example_start(const ExampleNet& e) {
    Configuration s;
    s.add_token(e.p1, e.m1);
    s.add_token(e.p1, ComplexToken{});
    s.add_token(e.p1, e.m2);
    s.add_token(e.p2, e.m3);
    return s;
}

} // namespace nnct::testing

#endif
