/** Binary PPM (P6) image loading. Inputs are assumed pre-cropped to the
 * hand region; images are resized to the model's input size. */

import * as fs from 'node:fs';

import * as tf from '@tensorflow/tfjs';

export const INPUT_SIZE = 32;

export class ImageError extends Error {}

export interface RawImage {
  width: number;
  height: number;
  /** RGB, row-major, 3 bytes per pixel. */
  pixels: Uint8Array;
}

/** Parse a binary PPM (magic P6, maxval 255). Comments are supported. */
export function decodePpm(data: Buffer, name: string): RawImage {
  let offset = 0;
  const token = (): string => {
    // skip whitespace and '#' comment lines
    for (;;) {
      while (offset < data.length && /\s/.test(String.fromCharCode(data[offset]))) {
        offset++;
      }
      if (offset < data.length && data[offset] === 0x23) {
        while (offset < data.length && data[offset] !== 0x0a) offset++;
      } else {
        break;
      }
    }
    const start = offset;
    while (offset < data.length && !/\s/.test(String.fromCharCode(data[offset]))) {
      offset++;
    }
    return data.subarray(start, offset).toString('ascii');
  };
  if (token() !== 'P6') {
    throw new ImageError(`${name}: not a binary PPM (P6) file`);
  }
  const width = Number(token());
  const height = Number(token());
  const maxval = Number(token());
  if (!Number.isInteger(width) || !Number.isInteger(height) || width <= 0 || height <= 0) {
    throw new ImageError(`${name}: bad PPM dimensions`);
  }
  if (maxval !== 255) {
    throw new ImageError(`${name}: unsupported PPM maxval ${maxval}`);
  }
  offset++; // single whitespace after maxval
  const expected = width * height * 3;
  const pixels = data.subarray(offset, offset + expected);
  if (pixels.length !== expected) {
    throw new ImageError(`${name}: truncated PPM pixel data`);
  }
  return { width, height, pixels: new Uint8Array(pixels) };
}

/** Load one image as a [INPUT_SIZE, INPUT_SIZE, 3] float tensor in [0, 1]. */
export function loadImageTensor(filePath: string): tf.Tensor3D {
  const raw = decodePpm(fs.readFileSync(filePath), filePath);
  return tf.tidy(() => {
    const image = tf
      .tensor3d(raw.pixels, [raw.height, raw.width, 3], 'int32')
      .toFloat()
      .div(255);
    if (raw.height === INPUT_SIZE && raw.width === INPUT_SIZE) {
      return image as tf.Tensor3D;
    }
    return tf.image.resizeBilinear(image as tf.Tensor3D, [INPUT_SIZE, INPUT_SIZE]);
  });
}

export function encodePpm(image: RawImage): Buffer {
  const header = Buffer.from(`P6\n${image.width} ${image.height}\n255\n`, 'ascii');
  return Buffer.concat([header, Buffer.from(image.pixels)]);
}
