"""Complex arithmetic helpers and a numerical holomorphy check.

Complex values are plain Python ``complex`` numbers (a pair of 64-bit
floats); the real part carries the stimulus channel and the imaginary part
the neurotrophin-density channel.
"""


def cadd(z1, z2):
    """Component-wise sum of two complex values."""
    return complex(z1.real + z2.real, z1.imag + z2.imag)


def cmul(z1, z2):
    """Complex product (re1*re2 - im1*im2, re1*im2 + im1*re2)."""
    return complex(
        z1.real * z2.real - z1.imag * z2.imag,
        z1.real * z2.imag + z1.imag * z2.real,
    )


def check_cauchy_riemann(f, z, h=1e-5, tol=1e-6):
    """Numerically test whether ``f`` satisfies the Cauchy-Riemann equations at ``z``.

    Writes f(z1 + z2*i) = u(z1, z2) + v(z1, z2)*i and estimates the four
    partials with central differences of step ``h``.  Returns True iff

        |u_z1 - v_z2| <= tol  and  |u_z2 + v_z1| <= tol.

    ``h`` trades truncation against round-off; 1e-5 is a good default at
    64-bit precision.
    """
    if h <= 0:
        raise ValueError("step h must be positive")
    if tol <= 0:
        raise ValueError("tol must be positive")
    z = complex(z)
    f_re_plus = f(complex(z.real + h, z.imag))
    f_re_minus = f(complex(z.real - h, z.imag))
    f_im_plus = f(complex(z.real, z.imag + h))
    f_im_minus = f(complex(z.real, z.imag - h))
    u_z1 = (f_re_plus.real - f_re_minus.real) / (2.0 * h)
    v_z1 = (f_re_plus.imag - f_re_minus.imag) / (2.0 * h)
    u_z2 = (f_im_plus.real - f_im_minus.real) / (2.0 * h)
    v_z2 = (f_im_plus.imag - f_im_minus.imag) / (2.0 * h)
    return abs(u_z1 - v_z2) <= tol and abs(u_z2 + v_z1) <= tol
