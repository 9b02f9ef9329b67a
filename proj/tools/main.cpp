#include "parnet/cli.hpp"

int main(int argc, char** argv) { return parnet::run_command(argc, argv); }
