#include "phaselab/cli.hpp"

int main(int argc, char** argv) {
    return phaselab::cli::dispatch(argc, argv);
}
