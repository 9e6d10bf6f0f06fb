#include "pdegreedy/functionals.hpp"

namespace pdegreedy {

double gram_entry(const RadialKernel& kernel, const Functional& lhs, const Functional& rhs) {
    return kernel_apply(kernel, lhs.op, rhs.op, lhs.coords(), rhs.coords());
}

double representer_eval(const RadialKernel& kernel, const Functional& lambda,
                        std::span<const double> x) {
    return kernel_apply(kernel, lambda.op, OperatorTag::Identity, lambda.coords(), x);
}

}  // namespace pdegreedy
