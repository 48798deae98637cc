"""
Recalling gray-scale images from noisy copies
=============================================

Each pixel is a byte.  It can become eight bipolar neurons, one point on the
complex unit circle, one quaternion made of two 16-state phases, or one
octonion with a sign per bit.  The network stores the clean images and tries
to recover them from copies with Gaussian noise added.
"""

from hyperam.imaging import Codec, add_gaussian_noise, encode, recall_experiment, synthetic_images

images = synthetic_images(8, 16, 16, seed=0, kind="smooth")
noisy = add_gaussian_noise(images[0], 60, seed=1)
print("pixels changed by noise:", int((noisy.pixels != images[0].pixels).sum()), "of", images[0].pixels.size)

for codec in Codec:
    print(f"{codec.value:16s} {encode(images[0], codec).shape[0]:5d} neurons of dimension {codec.alphabet.dim}")

# A trial succeeds when the network returns exactly the stored image.
for codec in (Codec.QUATERNION_TWIN, Codec.BIPOLAR8):
    for row in recall_experiment(codec, images, [40, 80], trials=10, seed=2):
        print(f"{row.codec:16s} {row.mode:13s} sigma {row.noise_stdev:3g}: {row.successes}/{row.trials}")
