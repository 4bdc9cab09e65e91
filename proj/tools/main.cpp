#include "specembed/cli.hpp"

int main(int argc, char** argv)
{
    return specembed::cli::run(argc, argv);
}
