#include <mnarp/cli.hpp>

int main(int argc, char** argv)
{
    return mnarp::cli_main(argc, argv);
}
